"""Mention detection: typed spans in a sentence that point at table content.

Two backends exist. The deterministic one below covers named entities,
raw/derived values and structural references with rule families; the remote
one (inference module) can also produce referential and inferred entities.
Everything funnels through validate_mention_spans so no candidate with a
fabricated span survives.
"""

from __future__ import annotations

import enum
import re
import string
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterable, Mapping, Optional, Sequence

from .model import Table
from .quantity import is_quantity
from .pairing import TABLE_REFERENCE_RE
from .segmentation import Sentence

Span = tuple[int, int]


class MentionType(enum.Enum):
    NAMED_ENTITY = "named_entity"
    REFERENTIAL_ENTITY = "referential_entity"
    INFERRED_ENTITY = "inferred_entity"
    RAW_VALUE = "raw_value"
    DERIVED_VALUE = "derived_value"
    STRUCTURAL = "structural"


ENTITY_TYPES = frozenset(
    {MentionType.NAMED_ENTITY, MentionType.REFERENTIAL_ENTITY, MentionType.INFERRED_ENTITY}
)


class MentionSource(enum.Enum):
    DETERMINISTIC = "deterministic"
    REMOTE = "remote"


@dataclass(frozen=True)
class Mention:
    id: str
    sentence_id: str
    text: str
    span: Span
    mtype: MentionType
    source: MentionSource = MentionSource.DETERMINISTIC


# ---------------------------------------------------------------------------
# tokenization and normalization

_TOKEN_RE = re.compile(r"\S+")

_STRIP_CHARS = string.punctuation + "“”‘’«»"


def tokenize(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def normalize_token(token: str) -> str:
    t = token.strip(_STRIP_CHARS).casefold()
    if len(t) > 2 and t.endswith("s") and not t.endswith("ss"):
        t = t[:-1]
    return t


def normalize_phrase(text: str) -> frozenset[str]:
    """Token set used for entity matching: case-folded, punctuation-stripped,
    plural-trimmed."""
    return frozenset(t for t in (normalize_token(tok) for tok in text.split()) if t)


# ---------------------------------------------------------------------------
# cue lexicon (derived-value detection)

_NUM_WINDOW = 4  # tokens between a number and a comparison cue


def load_cues(path: Optional[str] = None) -> tuple[tuple[str, ...], ...]:
    """Comparison-cue lexicon, one cue per line; multi-word cues allowed."""
    if path is None:
        data = resources.files("tablink").joinpath("assets/cues.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            data = fh.read()
    cues = []
    for line in data.splitlines():
        line = line.strip()
        if line:
            cues.append(tuple(normalize_token(w) or w for w in line.split()))
    return tuple(cues)


_DEFAULT_CUES: Optional[tuple[tuple[str, ...], ...]] = None


def default_cues() -> tuple[tuple[str, ...], ...]:
    global _DEFAULT_CUES
    if _DEFAULT_CUES is None:
        _DEFAULT_CUES = load_cues()
    return _DEFAULT_CUES


# ---------------------------------------------------------------------------
# rule families

_NUMERIC_TOKEN_RE = re.compile(
    r"(?<![\w.,])"
    r"[+\-−]?\d+(?:,\d{3})*(?:\.\d+)?"
    r"(?:[eE][+\-−]?\d+|[KkMmBbTt](?![\w]))?"
    r"%?"
    r"(?!\w)"
)

_ORDINAL_WORDS = (
    "first second third fourth fifth sixth seventh eighth ninth tenth last".split()
)
_COUNT_WORDS = "two three four five six seven eight nine ten".split()

_STRUCTURAL_RE = re.compile(
    r"\b(?:the\s+)?"
    r"(?:"
    rf"(?P<ordinal>{'|'.join(_ORDINAL_WORDS)})\s+"
    rf"(?:(?P<count>{'|'.join(_COUNT_WORDS)}|\d+)\s+)?"
    r"(?P<axis_a>rows?|columns?)"
    r"|"
    r"(?P<axis_b>row|column)\s+(?P<index>\d+)"
    r")\b",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class StructuralRef:
    """Parsed ordinal reference: one line, a block of lines, or 'row N'."""

    axis: str  # "row" | "column"
    ordinal: Optional[str] = None  # word from _ORDINAL_WORDS
    count: Optional[int] = None  # "first two rows" -> 2
    index: Optional[int] = None  # "row 3" -> 3 (1-based)


def parse_structural_phrase(text: str) -> Optional[StructuralRef]:
    m = _STRUCTURAL_RE.search(text)
    if m is None:
        return None
    if m.group("index") is not None:
        axis = "row" if m.group("axis_b").lower() == "row" else "column"
        return StructuralRef(axis=axis, index=int(m.group("index")))
    axis = "row" if m.group("axis_a").lower().startswith("row") else "column"
    count = None
    if m.group("count"):
        raw = m.group("count").lower()
        count = int(raw) if raw.isdigit() else _COUNT_WORDS.index(raw) + 2
    return StructuralRef(axis=axis, ordinal=m.group("ordinal").lower(), count=count)


def _entity_vocabulary(table: Table) -> list[tuple[frozenset[str], str]]:
    """Normalized texts of header and stub cells (skipping bare numbers)."""
    vocab = []
    for cell in table.cells:
        if not cell.text or cell.numeric is not None:
            continue
        is_header = cell.row < table.header_rows
        is_stub = cell.col == 0 and cell.row >= table.header_rows
        if not (is_header or is_stub):
            continue
        tokens = normalize_phrase(cell.text)
        if tokens:
            vocab.append((tokens, cell.id))
    return vocab


def _detect_entities(sentence: Sentence, table: Table) -> list[tuple[Span, str]]:
    vocab = _entity_vocabulary(table)
    if not vocab:
        return []
    tokens = tokenize(sentence.text)
    taken = [False] * len(tokens)
    found: list[tuple[Span, str]] = []
    for n in range(min(6, len(tokens)), 0, -1):
        for i in range(len(tokens) - n + 1):
            if any(taken[i : i + n]):
                continue
            phrase = frozenset(
                t for t in (normalize_token(tok) for tok, _, _ in tokens[i : i + n]) if t
            )
            if not phrase:
                continue
            for cell_tokens, _cid in vocab:
                if phrase == cell_tokens:
                    start = tokens[i][1]
                    end = tokens[i + n - 1][2]
                    found.append(((start, end), sentence.text[start:end]))
                    for k in range(i, i + n):
                        taken[k] = True
                    break
    return found


def _detect_structural(sentence: Sentence) -> list[Span]:
    return [(m.start(), m.end()) for m in _STRUCTURAL_RE.finditer(sentence.text)]


def _cue_token_indices(tokens: Sequence[tuple[str, int, int]], cues) -> set[int]:
    normalized = [normalize_token(tok) or tok for tok, _, _ in tokens]
    hits: set[int] = set()
    for cue in cues:
        width = len(cue)
        for i in range(len(tokens) - width + 1):
            if tuple(normalized[i : i + width]) == cue:
                hits.update(range(i, i + width))
    return hits


def detect_mentions_deterministic(
    sentence: Sentence,
    table: Table,
    cues: Optional[tuple[tuple[str, ...], ...]] = None,
) -> list[Mention]:
    """Rule-based mention candidates for one sentence-table pair.

    Produces named entities (vocabulary match), raw values, derived values
    (number near a comparison cue) and structural references. Referential
    and inferred entities require the remote backend.
    """
    if cues is None:
        cues = default_cues()
    text = sentence.text

    structural_spans = _detect_structural(sentence)
    reference_spans = [(m.start(), m.end()) for m in TABLE_REFERENCE_RE.finditer(text)]

    tokens = tokenize(text)
    cue_hits = _cue_token_indices(tokens, cues)

    raw: list[tuple[Span, MentionType]] = []
    for m in _NUMERIC_TOKEN_RE.finditer(text):
        span = (m.start(), m.end())
        if not is_quantity(m.group()):
            continue
        if any(_overlaps(span, s) for s in reference_spans):
            continue  # "Table 3" is a citation, not a value
        if any(_contains(s, span) for s in structural_spans):
            continue  # the 7 in "row 7" belongs to the structural mention
        token_idx = _token_index_at(tokens, m.start())
        is_derived = token_idx is not None and any(
            abs(token_idx - c) <= _NUM_WINDOW for c in cue_hits
        )
        raw.append((span, MentionType.DERIVED_VALUE if is_derived else MentionType.RAW_VALUE))

    candidates: list[tuple[Span, MentionType]] = []
    for span, cell_text in _detect_entities(sentence, table):
        candidates.append((span, MentionType.NAMED_ENTITY))
    candidates.extend(raw)
    for span in structural_spans:
        candidates.append((span, MentionType.STRUCTURAL))

    candidates.sort(key=lambda it: (it[0][0], it[0][1], it[1].value))
    mentions = []
    for i, (span, mtype) in enumerate(candidates):
        mentions.append(
            Mention(
                id=f"{sentence.id}:m{i}",
                sentence_id=sentence.id,
                text=text[span[0] : span[1]],
                span=span,
                mtype=mtype,
                source=MentionSource.DETERMINISTIC,
            )
        )
    return mentions


def _token_index_at(tokens: Sequence[tuple[str, int, int]], pos: int) -> Optional[int]:
    for i, (_, start, end) in enumerate(tokens):
        if start <= pos < end:
            return i
    return None


def _overlaps(a: Span, b: Span) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def _contains(outer: Span, inner: Span) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


# ---------------------------------------------------------------------------
# span validation (anti-hallucination guard)


def validate_mention_spans(
    sentence: Sentence, candidates: Iterable[Mapping | Mention]
) -> list[Mention]:
    """Keep only candidates whose span text really occurs in the sentence.

    A candidate without a span is repaired when its text occurs exactly
    once; duplicates on (span, type) collapse to the first occurrence.
    """
    text = sentence.text
    out: list[Mention] = []
    seen: set[tuple[Span, MentionType]] = set()
    for i, cand in enumerate(candidates):
        if isinstance(cand, Mention):
            surface, span, mtype, source = cand.text, cand.span, cand.mtype, cand.source
        else:
            surface = cand.get("text")
            start, end = cand.get("start"), cand.get("end")
            span = (start, end) if start is not None and end is not None else None
            try:
                mtype = MentionType(cand.get("type"))
            except ValueError:
                continue
            source = MentionSource.REMOTE
        if not isinstance(surface, str) or not surface:
            continue
        if span is None:
            if text.count(surface) == 1:
                start = text.index(surface)
                span = (start, start + len(surface))
            else:
                continue
        start, end = span
        if not (0 <= start < end <= len(text)) or text[start:end] != surface:
            continue
        key = ((start, end), mtype)
        if key in seen:
            continue
        seen.add(key)
        out.append(
            Mention(
                id=f"{sentence.id}:v{i}",
                sentence_id=sentence.id,
                text=surface,
                span=(start, end),
                mtype=mtype,
                source=source,
            )
        )
    return out


def combine_mentions(
    deterministic: Sequence[Mention], remote: Sequence[Mention]
) -> list[Mention]:
    """Merge the two backends: remote candidates replace a deterministic one
    only when they claim the same span with a different type; otherwise the
    deterministic candidate stays and new spans are appended."""
    by_span: dict[Span, Mention] = {m.span: m for m in deterministic}
    for cand in remote:
        existing = by_span.get(cand.span)
        if existing is None or existing.mtype != cand.mtype:
            by_span[cand.span] = cand
    merged = sorted(by_span.values(), key=lambda m: (m.span[0], m.span[1], m.mtype.value))
    return [
        replace(m, id=f"{m.sentence_id}:m{i}") for i, m in enumerate(merged)
    ]
