"""Paragraph reconstruction and paragraph-table pairing.

Layout extraction tends to split paragraphs at page and column breaks, so
blocks are first merged back together; afterwards every paragraph citing a
table number that exists in the document yields one pair per cited table.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .model import Paragraph, ParsedDocument

log = logging.getLogger(__name__)

Span = tuple[int, int]

# "Table 3", "Tab. 2", "Tables 2 and 3", "Tables 2-4" (and dash variants).
TABLE_REFERENCE_RE = re.compile(
    r"\b(?:tables?|tab\.?)\s+(\d+(?:\s*(?:[-–—]|,|and|to)\s*\d+)*)",
    re.IGNORECASE,
)
_NUMBER_OR_RANGE_RE = re.compile(r"(\d+)(?:\s*[-–—to]+\s*(\d+))?")

_MAX_RANGE_WIDTH = 30

# A block is "closed" when it ends with a sentence terminator, optionally
# followed by a closing quote or bracket.
_TERMINATED_RE = re.compile(r"[.!?][\"'”’)\]]*\s*$")
_HYPHEN_BREAK_RE = re.compile(r"-$")


@dataclass(frozen=True)
class ParagraphTablePair:
    paragraph_id: str
    table_id: str
    reference_spans: tuple[Span, ...]


def find_table_references(text: str) -> list[tuple[int, Span]]:
    """All table numbers cited in `text`, each with the span of the citing
    phrase. Numbers are deduplicated within one phrase, first occurrence
    order preserved.
    """
    out: list[tuple[int, Span]] = []
    for m in TABLE_REFERENCE_RE.finditer(text):
        span = (m.start(), m.end())
        numbers: list[int] = []
        for nm in _NUMBER_OR_RANGE_RE.finditer(m.group(1)):
            lo = int(nm.group(1))
            if nm.group(2) is not None:
                hi = int(nm.group(2))
                if lo <= hi and hi - lo <= _MAX_RANGE_WIDTH:
                    numbers.extend(range(lo, hi + 1))
                else:
                    numbers.extend((lo, hi))
            else:
                numbers.append(lo)
        seen: set[int] = set()
        for n in numbers:
            if n not in seen:
                seen.add(n)
                out.append((n, span))
    return out


def _merge_two(a: Paragraph, b: Paragraph) -> Paragraph | None:
    """Merge b into a when a looks unterminated and b looks like a
    continuation; returns None when the blocks should stay separate."""
    a_text = a.text.rstrip()
    if _TERMINATED_RE.search(a.text):
        return None
    b_text = b.text.lstrip()
    if not b_text or not (b_text[0].islower() or b_text[0].isdigit()):
        return None
    if _HYPHEN_BREAK_RE.search(a_text) and b_text[0].islower():
        joined = a_text[:-1] + b_text
    else:
        joined = a_text + " " + b_text
    return Paragraph(id=a.id, page=a.page, box=a.box, text=joined)


def merge_text_chunks(blocks: list[Paragraph]) -> list[Paragraph]:
    """Rejoin layout chunks into full paragraphs.

    Blocks must already be in reading order. A block absorbs the next one
    when it lacks terminal punctuation and the next starts lowercase or
    with a digit; line-break hyphenation is repaired during the join.
    """
    out: list[Paragraph] = []
    for block in blocks:
        if out:
            merged = _merge_two(out[-1], block)
            if merged is not None:
                out[-1] = merged
                continue
        out.append(block)
    return out


def build_pairs(doc: ParsedDocument) -> list[ParagraphTablePair]:
    """One pair per (paragraph, cited table number present in the document).

    Citations of numbers with no matching table are logged and dropped.
    """
    by_number: dict[int, str] = {}
    for table in doc.tables:
        by_number.setdefault(table.number, table.id)

    pairs: list[ParagraphTablePair] = []
    for paragraph in doc.paragraphs:
        spans_by_number: dict[int, list[Span]] = {}
        for number, span in find_table_references(paragraph.text):
            spans_by_number.setdefault(number, []).append(span)
        for number, spans in spans_by_number.items():
            table_id = by_number.get(number)
            if table_id is None:
                log.warning(
                    "paragraph %s cites table %d which does not exist; skipping",
                    paragraph.id,
                    number,
                )
                continue
            pairs.append(
                ParagraphTablePair(
                    paragraph_id=paragraph.id,
                    table_id=table_id,
                    reference_spans=tuple(dict.fromkeys(spans)),
                )
            )
    return pairs
