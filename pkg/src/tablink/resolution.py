"""Grounding of mentions to table targets.

Three mechanism families: semantic (vocabulary match against header/stub
cells, remote reasoning for referential/inferred entities), numeric (cell
lookup with rounding tiers, brute-force derived-value search) and structural
(ordinal grammar). Anything that cannot be grounded is dropped.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .mentions import (
    ENTITY_TYPES,
    Mention,
    MentionType,
    normalize_phrase,
    parse_structural_phrase,
)
from .model import Cell, Table
from .quantity import (
    NumericValue,
    QuantityParseError,
    magnitudes_equal,
    parse_quantity,
    round_half_up,
)

log = logging.getLogger(__name__)

APPROX_REL_TOL = 0.02  # scale-suffixed values only, e.g. 1.6T vs 1.57E+12


class Granularity(enum.Enum):
    CELL = "cell"
    ROW = "row"
    COLUMN = "column"
    REGION = "region"


class Mechanism(enum.Enum):
    SEMANTIC = "semantic"
    NUMERIC = "numeric"
    STRUCTURAL = "structural"


@dataclass(frozen=True)
class AlignmentTarget:
    granularity: Granularity
    cells: tuple[str, ...] = ()  # CELL: anchor ids
    row: Optional[int] = None  # ROW
    col: Optional[int] = None  # COLUMN
    rect: Optional[tuple[int, int, int, int]] = None  # REGION: row0, row1, col0, col1

    @staticmethod
    def for_cells(cell_ids: Sequence[str]) -> "AlignmentTarget":
        return AlignmentTarget(Granularity.CELL, cells=tuple(sorted(set(cell_ids))))

    @staticmethod
    def for_row(row: int) -> "AlignmentTarget":
        return AlignmentTarget(Granularity.ROW, row=row)

    @staticmethod
    def for_column(col: int) -> "AlignmentTarget":
        return AlignmentTarget(Granularity.COLUMN, col=col)

    @staticmethod
    def for_region(row0: int, row1: int, col0: int, col1: int) -> "AlignmentTarget":
        return AlignmentTarget(Granularity.REGION, rect=(row0, row1, col0, col1))

    def validate_for(self, table: Table) -> None:
        if self.granularity is Granularity.CELL:
            if not self.cells:
                raise ValueError("cell target with no cells")
            for cid in self.cells:
                table.cell_by_id(cid)
        elif self.granularity is Granularity.ROW:
            if not (self.row is not None and 0 <= self.row < table.n_rows):
                raise ValueError(f"row {self.row} outside grid")
        elif self.granularity is Granularity.COLUMN:
            if not (self.col is not None and 0 <= self.col < table.n_cols):
                raise ValueError(f"column {self.col} outside grid")
        else:
            r0, r1, c0, c1 = self.rect
            if not (0 <= r0 <= r1 < table.n_rows and 0 <= c0 <= c1 < table.n_cols):
                raise ValueError(f"region {self.rect} outside grid")

    def covered_positions(self, table: Table) -> frozenset[tuple[int, int]]:
        """Grid positions the target occupies (merged cells contribute their
        whole span)."""
        if self.granularity is Granularity.CELL:
            out = set()
            for cid in self.cells:
                out.update(table.cell_by_id(cid).positions())
            return frozenset(out)
        if self.granularity is Granularity.ROW:
            return frozenset((self.row, c) for c in range(table.n_cols))
        if self.granularity is Granularity.COLUMN:
            return frozenset((r, self.col) for r in range(table.n_rows))
        r0, r1, c0, c1 = self.rect
        return frozenset(
            (r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)
        )

    def covered_cells(self, table: Table) -> frozenset[str]:
        return frozenset(
            table.cell_at(r, c).id for (r, c) in self.covered_positions(table)
        )


@dataclass(frozen=True)
class MentionAlignment:
    mention_id: str
    target: AlignmentTarget
    mechanism: Mechanism
    evidence: dict = field(default_factory=dict)
    rank: int = 1


def decode_wire_target(payload, table: Table) -> AlignmentTarget:
    """Decode {"granularity", "cells"|"row"|"col"|"rect"} and validate it
    against the grid."""
    if not isinstance(payload, dict):
        raise ValueError("target payload must be an object")
    gran = Granularity(payload.get("granularity"))
    if gran is Granularity.CELL:
        target = AlignmentTarget.for_cells(payload["cells"])
    elif gran is Granularity.ROW:
        target = AlignmentTarget.for_row(int(payload["row"]))
    elif gran is Granularity.COLUMN:
        target = AlignmentTarget.for_column(int(payload["col"]))
    else:
        r0, r1, c0, c1 = (int(v) for v in payload["rect"])
        target = AlignmentTarget.for_region(r0, r1, c0, c1)
    target.validate_for(table)
    return target


# ---------------------------------------------------------------------------
# semantic


def _is_spanning_label(cell: Cell, table: Table) -> bool:
    return cell.col_span == table.n_cols


def resolve_entity(mention: Mention, table: Table, client=None) -> Optional[MentionAlignment]:
    """Ground an entity mention.

    Named entities match normalized cell text: stub-column and spanning
    labels give the row, header cells give the column, interior cells give
    the cell itself. Referential/inferred entities need the remote backend.
    """
    if mention.mtype not in ENTITY_TYPES:
        return None

    if mention.mtype is not MentionType.NAMED_ENTITY:
        if client is None:
            return None
        payload = client.request_resolve(mention, table)
        if not payload or "target" not in payload:
            return None
        try:
            target = decode_wire_target(payload["target"], table)
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("remote target for %r rejected: %s", mention.text, exc)
            return None
        return MentionAlignment(
            mention_id=mention.id,
            target=target,
            mechanism=Mechanism.SEMANTIC,
            evidence={"match_role": "remote", "mention_text": mention.text},
        )

    phrase = normalize_phrase(mention.text)
    if not phrase:
        return None
    matches: list[tuple[int, Cell, str]] = []
    for cell in table.cells:  # cells are in (row, col) order
        if not cell.text or cell.numeric is not None:
            continue
        if normalize_phrase(cell.text) != phrase:
            continue
        if cell.row >= table.header_rows and (cell.col == 0 or _is_spanning_label(cell, table)):
            role, priority = ("spanning" if _is_spanning_label(cell, table) else "stub"), 0
        elif cell.row < table.header_rows:
            role, priority = "header", 1
        else:
            role, priority = "interior", 2
        matches.append((priority, cell, role))
    if not matches:
        return None
    matches.sort(key=lambda m: (m[0], m[1].row, m[1].col))
    _, cell, role = matches[0]
    if role in ("stub", "spanning"):
        target = AlignmentTarget.for_row(cell.row)
    elif role == "header":
        target = AlignmentTarget.for_column(cell.col)
    else:
        target = AlignmentTarget.for_cells([cell.id])
    return MentionAlignment(
        mention_id=mention.id,
        target=target,
        mechanism=Mechanism.SEMANTIC,
        evidence={"matched_cell": cell.id, "matched_text": cell.text, "match_role": role},
    )


# ---------------------------------------------------------------------------
# numeric

_TIER_NAMES = {0: "exact", 1: "rounding", 2: "approximate"}


def _match_tier(
    cell_value: NumericValue, value: NumericValue, approx_rel_tol: float = APPROX_REL_TOL
) -> Optional[int]:
    if magnitudes_equal(cell_value.magnitude, value.magnitude):
        return 0
    if magnitudes_equal(
        round_half_up(cell_value.magnitude, value.display_precision), value.magnitude
    ):
        return 1
    if value.has_scale and cell_value.has_scale and cell_value.magnitude != 0:
        rel = abs(value.magnitude - cell_value.magnitude) / abs(cell_value.magnitude)
        if rel <= approx_rel_tol:
            return 2
    return None


def _proximity(cell: Cell, context_positions: Sequence[frozenset[tuple[int, int]]]) -> int:
    """0 when the cell lies inside a context target, otherwise the smallest
    Manhattan distance to one; 0 with no context."""
    if not context_positions:
        return 0
    own = set(cell.positions())
    best = None
    for positions in context_positions:
        for (r, c) in positions:
            d = min(abs(r - cr) + abs(c - cc) for (cr, cc) in own)
            if best is None or d < best:
                best = d
                if best == 0:
                    return 0
    return best if best is not None else 0


def _context_positions(
    context: Sequence[MentionAlignment], table: Table
) -> list[frozenset[tuple[int, int]]]:
    return [a.target.covered_positions(table) for a in context]


def resolve_raw_value(
    mention: Mention,
    table: Table,
    context: Sequence[MentionAlignment] = (),
    approx_rel_tol: float = APPROX_REL_TOL,
) -> Optional[MentionAlignment]:
    """Match a numeric mention against cell values.

    Tiers: exact magnitude, cell rounded half-up to the mention's precision,
    and (for scale-suffixed values on both sides) a 2% relative tolerance.
    Cells tying at the best (tier, proximity) form one cell-set target; the
    rest stay in the evidence, ranked.
    """
    try:
        value = parse_quantity(mention.text)
    except QuantityParseError:
        return None
    ctx = _context_positions(context, table)
    scored: list[tuple[int, int, Cell]] = []
    for cell in table.cells:
        if cell.numeric is None:
            continue
        tier = _match_tier(cell.numeric, value, approx_rel_tol)
        if tier is None:
            continue
        scored.append((tier, _proximity(cell, ctx), cell))
    if not scored:
        return None
    scored.sort(key=lambda s: (s[0], s[1], s[2].row, s[2].col))
    best_tier, best_prox, _ = scored[0]
    chosen = [c for t, p, c in scored if (t, p) == (best_tier, best_prox)]
    evidence = {
        "value": value.magnitude,
        "tier": _TIER_NAMES[best_tier],
        "ambiguous": len(chosen) > 1,
        "candidates": [
            {"cell": c.id, "tier": _TIER_NAMES[t], "proximity": p, "rank": i + 1}
            for i, (t, p, c) in enumerate(scored)
        ],
    }
    return MentionAlignment(
        mention_id=mention.id,
        target=AlignmentTarget.for_cells([c.id for c in chosen]),
        mechanism=Mechanism.NUMERIC,
        evidence=evidence,
    )


class DerivedScope(enum.Enum):
    SAME_COLUMN = "same_column"
    SAME_ROW = "same_row"
    WHOLE_TABLE = "whole_table"


OPERATIONS = ("difference", "absolute_difference", "percent_change", "ratio")


def _apply_operation(op: str, a: float, b: float) -> Optional[float]:
    if op == "difference":
        return a - b
    if op == "absolute_difference":
        return abs(a - b)
    if op == "percent_change":
        return 100.0 * (a - b) / b if b != 0 else None
    if op == "ratio":
        return a / b if b != 0 else None
    raise ValueError(op)


@dataclass(frozen=True)
class DerivedCandidate:
    op: str
    cell_a: str
    cell_b: str
    computed: float
    same_column: bool
    same_row: bool
    grid_distance: int


def derived_value_oracle(
    value: NumericValue, table: Table, scope: DerivedScope
) -> list[DerivedCandidate]:
    """Brute-force enumeration of ordered numeric-cell pairs whose difference,
    absolute difference, percent change or ratio reproduces `value` under the
    rounding rule. Sorted: same-column pairs, then same-row, then the rest;
    ties by grid distance, then cell ids.
    """
    numeric = [c for c in table.cells if c.numeric is not None]
    out: list[DerivedCandidate] = []
    for a in numeric:
        for b in numeric:
            if a.id == b.id:
                continue
            same_col = a.col == b.col
            same_row = a.row == b.row
            if scope is DerivedScope.SAME_COLUMN and not same_col:
                continue
            if scope is DerivedScope.SAME_ROW and not same_row:
                continue
            for op in OPERATIONS:
                computed = _apply_operation(op, a.numeric.magnitude, b.numeric.magnitude)
                if computed is None:
                    continue
                if magnitudes_equal(
                    round_half_up(computed, value.display_precision), value.magnitude
                ):
                    out.append(
                        DerivedCandidate(
                            op=op,
                            cell_a=a.id,
                            cell_b=b.id,
                            computed=computed,
                            same_column=same_col,
                            same_row=same_row,
                            grid_distance=abs(a.row - b.row) + abs(a.col - b.col),
                        )
                    )
                    break  # one candidate per pair: first matching operation
    # op priority ahead of the id tiebreak so a signed difference outranks
    # the mirrored pair matching only through the absolute value
    out.sort(
        key=lambda c: (
            0 if c.same_column else (1 if c.same_row else 2),
            c.grid_distance,
            OPERATIONS.index(c.op),
            c.cell_a,
            c.cell_b,
        )
    )
    return out


def resolve_derived_value(
    mention: Mention, table: Table, context: Sequence[MentionAlignment] = ()
) -> Optional[MentionAlignment]:
    """Find the cell pair a derived value was computed from.

    Scope escalates same-column -> same-row -> whole-table, stopping at the
    first scope with candidates; entity targets already resolved in the
    sentence pull matching pairs to the front.
    """
    try:
        value = parse_quantity(mention.text)
    except QuantityParseError:
        return None
    candidates: list[DerivedCandidate] = []
    scope_used = None
    for scope in (DerivedScope.SAME_COLUMN, DerivedScope.SAME_ROW, DerivedScope.WHOLE_TABLE):
        candidates = derived_value_oracle(value, table, scope)
        if candidates:
            scope_used = scope
            break
    if not candidates:
        return None

    ctx = _context_positions(context, table)

    def uncovered(cand: DerivedCandidate) -> int:
        score = 2
        for cid in (cand.cell_a, cand.cell_b):
            own = set(table.cell_by_id(cid).positions())
            if any(own & positions for positions in ctx):
                score -= 1
        return score

    if ctx:
        candidates = sorted(candidates, key=uncovered)  # stable: oracle order kept
    best = candidates[0]
    listed = candidates[:20]
    evidence = {
        "operation": best.op,
        "operands": [best.cell_a, best.cell_b],
        "computed": best.computed,
        "scope": scope_used.value,
        "candidates": [
            {
                "op": c.op,
                "operands": [c.cell_a, c.cell_b],
                "computed": c.computed,
                "rank": i + 1,
            }
            for i, c in enumerate(listed)
        ],
        "candidate_count": len(candidates),
    }
    return MentionAlignment(
        mention_id=mention.id,
        target=AlignmentTarget.for_cells([best.cell_a, best.cell_b]),
        mechanism=Mechanism.NUMERIC,
        evidence=evidence,
    )


# ---------------------------------------------------------------------------
# structural

_ORDINAL_INDEX = {
    "first": 0,
    "second": 1,
    "third": 2,
    "fourth": 3,
    "fifth": 4,
    "sixth": 5,
    "seventh": 6,
    "eighth": 7,
    "ninth": 8,
    "tenth": 9,
}


def resolve_structural(mention: Mention, table: Table) -> Optional[MentionAlignment]:
    """Ground an ordinal reference. Row ordinals count data rows only;
    columns are absolute. Out-of-range ordinals are logged and dropped."""
    ref = parse_structural_phrase(mention.text)
    if ref is None:
        return None
    extent = table.n_data_rows if ref.axis == "row" else table.n_cols

    if ref.index is not None:
        lo = hi = ref.index - 1
    else:
        if ref.ordinal == "last":
            anchor = extent - 1
            lo, hi = (anchor - (ref.count - 1), anchor) if ref.count else (anchor, anchor)
        else:
            anchor = _ORDINAL_INDEX[ref.ordinal]
            lo, hi = (anchor, anchor + ref.count - 1) if ref.count else (anchor, anchor)
    if lo < 0 or hi >= extent:
        log.warning(
            "structural mention %r out of range for %s extent %d",
            mention.text,
            ref.axis,
            extent,
        )
        return None

    if ref.axis == "row":
        lo += table.header_rows
        hi += table.header_rows
        if lo == hi:
            target = AlignmentTarget.for_row(lo)
        else:
            target = AlignmentTarget.for_region(lo, hi, 0, table.n_cols - 1)
    else:
        if lo == hi:
            target = AlignmentTarget.for_column(lo)
        else:
            target = AlignmentTarget.for_region(0, table.n_rows - 1, lo, hi)
    return MentionAlignment(
        mention_id=mention.id,
        target=target,
        mechanism=Mechanism.STRUCTURAL,
        evidence={
            "phrase": mention.text,
            "axis": ref.axis,
            "resolved": [lo, hi] if lo != hi else lo,
        },
    )


# ---------------------------------------------------------------------------
# sentence-level driver


def resolve_sentence(
    mentions: Sequence[Mention],
    table: Table,
    client=None,
    approx_rel_tol: float = APPROX_REL_TOL,
) -> list[MentionAlignment]:
    """Resolve all mentions of one sentence in two passes: entities and
    structural references first, then values using those targets as ranking
    context. Unresolvable mentions are dropped; backend failures downgrade
    to deterministic-only resolution."""
    from .inference import InferenceError

    resolved: dict[str, MentionAlignment] = {}
    for mention in mentions:
        alignment = None
        if mention.mtype in ENTITY_TYPES:
            try:
                alignment = resolve_entity(mention, table, client=client)
            except InferenceError as exc:
                log.warning("remote resolution unavailable for %r: %s", mention.text, exc)
        elif mention.mtype is MentionType.STRUCTURAL:
            alignment = resolve_structural(mention, table)
        if alignment is not None:
            resolved[mention.id] = alignment

    context = [a for a in resolved.values() if a.mechanism is Mechanism.SEMANTIC]
    for mention in mentions:
        if mention.mtype is MentionType.RAW_VALUE:
            alignment = resolve_raw_value(
                mention, table, context=context, approx_rel_tol=approx_rel_tol
            )
        elif mention.mtype is MentionType.DERIVED_VALUE:
            alignment = resolve_derived_value(mention, table, context=context)
        else:
            continue
        if alignment is not None:
            resolved[mention.id] = alignment

    return [resolved[m.id] for m in mentions if m.id in resolved]
