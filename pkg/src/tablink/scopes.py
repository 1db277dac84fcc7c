"""Sentence-level highlight construction.

Merges a sentence's mention targets into a small set of cohesive regions:
well-covered data rows are promoted to full rows, adjacent promoted rows and
columns collapse into rectangular regions, and leftover cells are grouped by
adjacency. The merge only ever adds coverage, is idempotent, and never emits
more regions than it was given targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import Table
from .resolution import AlignmentTarget, Granularity, MentionAlignment

PROMOTION_THRESHOLD_NUM = 1  # promoted when covered * 2 >= line length
PROMOTION_THRESHOLD_DEN = 2

_MAX_PASSES = 20

_GRANULARITY_ORDER = {
    Granularity.REGION: 0,
    Granularity.ROW: 1,
    Granularity.COLUMN: 2,
    Granularity.CELL: 3,
}


@dataclass(frozen=True)
class SentenceAlignment:
    sentence_id: str
    regions: tuple[AlignmentTarget, ...]


def _bbox(positions: frozenset[tuple[int, int]]) -> tuple[int, int, int, int]:
    rows = [r for r, _ in positions]
    cols = [c for _, c in positions]
    return (min(rows), min(cols), max(rows), max(cols))


@dataclass
class _Structure:
    target: AlignmentTarget
    positions: frozenset[tuple[int, int]]
    sources: set[int]  # indices of input targets this structure covers

    def sort_key(self, table: Table):
        r0, c0, r1, c1 = _bbox(self.positions)
        return (r0, c0, r1, c1, _GRANULARITY_ORDER[self.target.granularity])


def _runs(indices: list[int]) -> list[tuple[int, int]]:
    out = []
    for i in sorted(indices):
        if out and i == out[-1][1] + 1:
            out[-1] = (out[-1][0], i)
        else:
            out.append((i, i))
    return out


def _cell_set_target(table: Table, positions: frozenset[tuple[int, int]]) -> AlignmentTarget:
    return AlignmentTarget.for_cells(
        sorted({table.cell_at(r, c).id for (r, c) in positions})
    )


def _merge_pair(a: _Structure, b: _Structure, table: Table) -> _Structure:
    positions = a.positions | b.positions
    if (
        a.target.granularity is Granularity.CELL
        and b.target.granularity is Granularity.CELL
    ):
        target = _cell_set_target(table, positions)
        merged_positions = target.covered_positions(table)
    else:
        r0, c0, r1, c1 = _bbox(positions)
        target = AlignmentTarget.for_region(r0, r1, c0, c1)
        merged_positions = target.covered_positions(table)
    return _Structure(target, merged_positions, a.sources | b.sources)


def _merge_once(
    inputs: Sequence[AlignmentTarget], table: Table
) -> list[AlignmentTarget]:
    coverages = [t.covered_positions(table) for t in inputs]
    union: set[tuple[int, int]] = set()
    for cov in coverages:
        union.update(cov)

    def structure(target: AlignmentTarget) -> _Structure:
        positions = target.covered_positions(table)
        sources = {i for i, cov in enumerate(coverages) if cov & positions}
        return _Structure(target, positions, sources)

    structures: list[_Structure] = []
    absorbed: set[tuple[int, int]] = set()

    # 1. promote data rows with enough coverage, collapse adjacent runs
    promoted_rows = [
        r
        for r in range(table.header_rows, table.n_rows)
        if sum(1 for c in range(table.n_cols) if (r, c) in union)
        * PROMOTION_THRESHOLD_DEN
        >= table.n_cols * PROMOTION_THRESHOLD_NUM
    ]
    for r0, r1 in _runs(promoted_rows):
        if r0 == r1:
            structures.append(structure(AlignmentTarget.for_row(r0)))
        else:
            structures.append(
                structure(AlignmentTarget.for_region(r0, r1, 0, table.n_cols - 1))
            )
        absorbed.update((r, c) for r in range(r0, r1 + 1) for c in range(table.n_cols))

    # 2. columns, from what rows did not absorb (rows win shared cells)
    remaining = union - absorbed
    promoted_cols = [
        c
        for c in range(table.n_cols)
        if sum(1 for r in range(table.header_rows, table.n_rows) if (r, c) in remaining)
        * PROMOTION_THRESHOLD_DEN
        >= table.n_data_rows * PROMOTION_THRESHOLD_NUM
    ]
    for c0, c1 in _runs(promoted_cols):
        if c0 == c1:
            structures.append(structure(AlignmentTarget.for_column(c0)))
        else:
            structures.append(
                structure(AlignmentTarget.for_region(0, table.n_rows - 1, c0, c1))
            )
        absorbed.update((r, c) for r in range(table.n_rows) for c in range(c0, c1 + 1))

    # 3. residual cells, one structure per adjacency component
    residual = union - absorbed
    residual_cells = {table.cell_at(r, c).id for (r, c) in residual}
    comp: dict[str, int] = {}
    next_comp = 0
    for cid in sorted(residual_cells):
        cell = table.cell_by_id(cid)
        neighbours = set()
        for (r, c) in cell.positions():
            for (rr, cc) in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if (rr, cc) in residual:
                    nid = table.cell_at(rr, cc).id
                    if nid in comp:
                        neighbours.add(comp[nid])
        if neighbours:
            keep = min(neighbours)
            comp[cid] = keep
            for other, group in list(comp.items()):
                if group in neighbours:
                    comp[other] = keep
        else:
            comp[cid] = next_comp
            next_comp += 1
    by_group: dict[int, set[tuple[int, int]]] = {}
    for cid, group in comp.items():
        by_group.setdefault(group, set()).update(table.cell_by_id(cid).positions())
    for group in sorted(by_group):
        positions = frozenset(by_group[group])
        structures.append(structure(_cell_set_target(table, positions)))

    # 4. never emit more structures than inputs: coarsen pairs that share an
    #    originating target until within budget
    while len(structures) > len(inputs):
        best = None
        for i in range(len(structures)):
            for j in range(i + 1, len(structures)):
                if structures[i].sources & structures[j].sources:
                    r0, c0, r1, c1 = _bbox(structures[i].positions | structures[j].positions)
                    key = ((r1 - r0 + 1) * (c1 - c0 + 1), r0, c0, r1, c1, i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, i, j = best
        merged = _merge_pair(structures[i], structures[j], table)
        structures = [s for k, s in enumerate(structures) if k not in (i, j)]
        structures.append(merged)

    structures.sort(key=lambda s: s.sort_key(table))
    return [s.target for s in structures]


def merge_targets(
    alignments: Sequence[MentionAlignment], table: Table, sentence_id: str = ""
) -> SentenceAlignment:
    """Merge one sentence's mention alignments into highlight regions."""
    targets: list[AlignmentTarget] = [a.target for a in alignments]
    if not targets:
        return SentenceAlignment(sentence_id=sentence_id, regions=())
    for _ in range(_MAX_PASSES):
        merged = _merge_once(targets, table)
        if merged == targets:
            break
        targets = merged
    return SentenceAlignment(sentence_id=sentence_id, regions=tuple(targets))
