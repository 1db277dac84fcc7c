"""Rule-based sentence segmentation with exact character spans.

A deliberately small splitter: boundaries sit after ., ! or ? followed by
whitespace and an uppercase/digit start, with protection for a configurable
abbreviation list and for decimal points. No statistical model, so spans
are reproducible across runs and machines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from .model import Paragraph

Span = tuple[int, int]

_TERMINATOR_RE = re.compile(r"[.!?]")


@dataclass(frozen=True)
class Sentence:
    id: str
    paragraph_id: str
    span: Span
    text: str


def load_abbreviations(path: Optional[str] = None) -> frozenset[str]:
    """Protected abbreviations, one per line; defaults to the packaged list."""
    if path is None:
        data = (
            resources.files("tablink")
            .joinpath("assets/abbreviations.txt")
            .read_text("utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            data = fh.read()
    return frozenset(line.strip() for line in data.splitlines() if line.strip())


_DEFAULT_ABBREVIATIONS: Optional[frozenset[str]] = None


def default_abbreviations() -> frozenset[str]:
    global _DEFAULT_ABBREVIATIONS
    if _DEFAULT_ABBREVIATIONS is None:
        _DEFAULT_ABBREVIATIONS = load_abbreviations()
    return _DEFAULT_ABBREVIATIONS


def _is_abbreviation_end(text: str, dot_index: int, abbreviations: frozenset[str]) -> bool:
    """True when the period at dot_index closes a protected abbreviation."""
    prefix = text[: dot_index + 1]
    words = prefix.rsplit(None, 2)
    candidates = []
    if words:
        candidates.append(words[-1])
        if len(words) >= 2:
            candidates.append(words[-2] + " " + words[-1])
    for cand in candidates:
        # Tolerate an opening bracket/quote glued to the front: "(e.g." .
        stripped = cand.lstrip("([\"'“‘")
        if stripped in abbreviations:
            return True
    return False


def _boundaries(text: str, abbreviations: frozenset[str]) -> Iterable[int]:
    for m in _TERMINATOR_RE.finditer(text):
        i = m.start()
        ch = text[i]
        if ch == "." and 0 < i < len(text) - 1:
            if text[i - 1].isdigit() and text[i + 1].isdigit():
                continue  # decimal point
        j = i + 1
        if j >= len(text) or not text[j].isspace():
            continue
        k = j
        while k < len(text) and text[k].isspace():
            k += 1
        if k >= len(text):
            continue
        if not (text[k].isupper() or text[k].isdigit()):
            continue
        if ch == "." and _is_abbreviation_end(text, i, abbreviations):
            continue
        yield j


def segment_sentences(
    paragraph: Paragraph,
    abbreviations: Optional[frozenset[str]] = None,
) -> list[Sentence]:
    """Split a paragraph into ordered sentences with half-open spans.

    Spans are trimmed to non-whitespace content; every non-whitespace
    character of the paragraph lands in exactly one sentence.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    text = paragraph.text
    cuts = list(_boundaries(text, abbreviations))
    starts = [0] + cuts
    ends = cuts + [len(text)]

    sentences = []
    for start, end in zip(starts, ends):
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start == end:
            continue
        index = len(sentences)
        sentences.append(
            Sentence(
                id=f"{paragraph.id}:s{index}",
                paragraph_id=paragraph.id,
                span=(start, end),
                text=text[start:end],
            )
        )
    return sentences
