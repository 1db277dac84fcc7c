"""Canonical parsed-document model: pages, paragraphs and position-aware
tables with uniquely identified cells.

Documents arrive as a JSON bundle produced upstream (no PDF handling here);
ingestion validates the bundle and builds immutable in-memory structures.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass
from html.parser import HTMLParser
from typing import Iterable, Mapping, Optional, Sequence

from .quantity import NumericValue, QuantityParseError, parse_quantity


class ValidationError(ValueError):
    """A bundle violates the canonical document format."""


class TableStructureError(ValidationError):
    """Table markup does not describe a well-formed rectangular grid."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in absolute page units, origin top-left."""

    x: float
    y: float
    w: float
    h: float

    def union(self, other: "Box") -> "Box":
        x0 = min(self.x, other.x)
        y0 = min(self.y, other.y)
        x1 = max(self.x + self.w, other.x + other.w)
        y1 = max(self.y + self.h, other.y + other.h)
        return Box(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class PageInfo:
    index: int
    width: float
    height: float


@dataclass(frozen=True)
class Paragraph:
    id: str
    page: int
    box: Box
    text: str


def cell_id(row: int, col: int) -> str:
    return f"r{row}c{col}"


_CELL_ID_RE = re.compile(r"^r(\d+)c(\d+)$")


def parse_cell_id(cid: str) -> tuple[int, int]:
    m = _CELL_ID_RE.match(cid)
    if m is None:
        raise ValueError(f"malformed cell id: {cid!r}")
    return int(m.group(1)), int(m.group(2))


@dataclass(frozen=True)
class Cell:
    id: str
    row: int
    col: int
    row_span: int
    col_span: int
    text: str
    numeric: Optional[NumericValue] = None
    box: Optional[Box] = None

    def positions(self) -> Iterable[tuple[int, int]]:
        for r in range(self.row, self.row + self.row_span):
            for c in range(self.col, self.col + self.col_span):
                yield (r, c)


class ComplexityBucket(enum.Enum):
    SIMPLE = "simple"
    STANDARD = "standard"
    COMPLEX = "complex"


@dataclass(frozen=True)
class Table:
    id: str
    number: int
    caption: str
    page: int
    box: Box
    n_rows: int
    n_cols: int
    cells: tuple[Cell, ...]
    header_rows: int = 1

    def __post_init__(self):
        covered: dict[tuple[int, int], str] = {}
        for cell in self.cells:
            if cell.id != cell_id(cell.row, cell.col):
                raise TableStructureError(
                    f"cell id {cell.id} does not match anchor ({cell.row}, {cell.col})"
                )
            for pos in cell.positions():
                r, c = pos
                if not (0 <= r < self.n_rows and 0 <= c < self.n_cols):
                    raise TableStructureError(
                        f"cell {cell.id} extends outside the {self.n_rows}x{self.n_cols} grid"
                    )
                if pos in covered:
                    raise TableStructureError(
                        f"cells {covered[pos]} and {cell.id} overlap at {pos}"
                    )
                covered[pos] = cell.id
        if len(covered) != self.n_rows * self.n_cols:
            missing = [
                (r, c)
                for r in range(self.n_rows)
                for c in range(self.n_cols)
                if (r, c) not in covered
            ]
            raise TableStructureError(f"grid positions not covered: {missing[:5]}")
        if not (0 <= self.header_rows < self.n_rows):
            raise ValidationError(
                f"table {self.id}: header_rows={self.header_rows} "
                f"must be < n_rows={self.n_rows}"
            )

    @property
    def area(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def n_data_rows(self) -> int:
        return self.n_rows - self.header_rows

    def cell_by_id(self, cid: str) -> Cell:
        return self._id_index[cid]

    def cell_at(self, row: int, col: int) -> Cell:
        return self._pos_index[(row, col)]

    @property
    def _id_index(self) -> Mapping[str, Cell]:
        idx = self.__dict__.get("_id_cache")
        if idx is None:
            idx = {c.id: c for c in self.cells}
            self.__dict__["_id_cache"] = idx
        return idx

    @property
    def _pos_index(self) -> Mapping[tuple[int, int], Cell]:
        idx = self.__dict__.get("_pos_cache")
        if idx is None:
            idx = {pos: c for c in self.cells for pos in c.positions()}
            self.__dict__["_pos_cache"] = idx
        return idx


@dataclass(frozen=True)
class ParsedDocument:
    doc_id: str
    pages: tuple[PageInfo, ...]
    paragraphs: tuple[Paragraph, ...]
    tables: tuple[Table, ...]
    content_hash: str = ""

    def table_by_id(self, table_id: str) -> Table:
        for t in self.tables:
            if t.id == table_id:
                return t
        raise KeyError(table_id)

    def paragraph_by_id(self, paragraph_id: str) -> Paragraph:
        for p in self.paragraphs:
            if p.id == paragraph_id:
                return p
        raise KeyError(paragraph_id)


@dataclass
class TableGrid:
    """Raw grid parsed from markup, before geometry is attached."""

    cells: list[Cell]
    n_rows: int
    n_cols: int


class _TableMarkupReader(HTMLParser):
    """Collects rows of (text, rowspan, colspan) from one <table> element."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.rows: list[list[tuple[str, int, int]]] = []
        self._row: Optional[list[tuple[str, int, int]]] = None
        self._cell_text: Optional[list[str]] = None
        self._spans: tuple[int, int] = (1, 1)
        self.table_seen = 0
        self._depth = 0

    def handle_starttag(self, tag, attrs):
        if tag == "table":
            self.table_seen += 1
            self._depth += 1
            return
        if self._depth == 0:
            return
        if tag == "tr":
            self._flush_cell()
            self._row = []
        elif tag in ("td", "th"):
            self._flush_cell()
            if self._row is None:
                self._row = []
            attr = dict(attrs)
            self._spans = (
                _positive_int(attr.get("rowspan", "1"), "rowspan"),
                _positive_int(attr.get("colspan", "1"), "colspan"),
            )
            self._cell_text = []

    def handle_endtag(self, tag):
        if tag == "table":
            self._flush_cell()
            self._flush_row()
            self._depth -= 1
        elif tag == "tr":
            self._flush_cell()
            self._flush_row()
        elif tag in ("td", "th"):
            self._flush_cell()

    def handle_data(self, data):
        if self._cell_text is not None:
            self._cell_text.append(data)

    def _flush_cell(self):
        if self._cell_text is not None:
            text = re.sub(r"\s+", " ", "".join(self._cell_text)).strip()
            rs, cs = self._spans
            self._row.append((text, rs, cs))
            self._cell_text = None

    def _flush_row(self):
        if self._row is not None:
            self.rows.append(self._row)
            self._row = None


def _positive_int(raw: str, name: str) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise TableStructureError(f"{name} is not an integer: {raw!r}")
    if value < 1:
        raise TableStructureError(f"{name} must be positive, got {value}")
    return value


def parse_table_grid(markup: str) -> TableGrid:
    """Parse table markup into an anchored-cell grid.

    Merged cells are represented once, at their anchor position, with spans.
    Short rows are padded with empty cells at the right edge; any interior
    hole is a structure error.
    """
    reader = _TableMarkupReader()
    reader.feed(markup)
    reader.close()
    if reader.table_seen != 1:
        raise TableStructureError(
            f"expected exactly one table element, found {reader.table_seen}"
        )
    rows = reader.rows  # an empty <tr> still advances the row index
    if not any(rows):
        raise TableStructureError("table has no rows")

    occupied: dict[tuple[int, int], str] = {}
    anchors: list[tuple[int, int, int, int, str]] = []
    n_cols = 0
    for r, row in enumerate(rows):
        cursor = 0
        for text, rowspan, colspan in row:
            while (r, cursor) in occupied:
                cursor += 1
            for rr in range(r, r + rowspan):
                for cc in range(cursor, cursor + colspan):
                    if (rr, cc) in occupied:
                        raise TableStructureError(
                            f"span of cell at ({r}, {cursor}) overlaps ({rr}, {cc})"
                        )
                    occupied[(rr, cc)] = cell_id(r, cursor)
            anchors.append((r, cursor, rowspan, colspan, text))
            n_cols = max(n_cols, cursor + colspan)
            cursor += colspan
    n_rows = max(r for r, _ in occupied) + 1

    # Padding policy: missing positions must form a suffix of their row.
    for r in range(n_rows):
        holes = [c for c in range(n_cols) if (r, c) not in occupied]
        for c in holes:
            if any((r, cc) in occupied for cc in range(c + 1, n_cols)):
                raise TableStructureError(
                    f"interior hole at ({r}, {c}); only right-edge padding is supported"
                )
            anchors.append((r, c, 1, 1, ""))
            occupied[(r, c)] = cell_id(r, c)

    cells = []
    for r, c, rs, cs, text in sorted(anchors):
        cells.append(
            Cell(
                id=cell_id(r, c),
                row=r,
                col=c,
                row_span=rs,
                col_span=cs,
                text=text,
                numeric=_try_parse_cell_number(text),
            )
        )
    return TableGrid(cells=cells, n_rows=n_rows, n_cols=n_cols)


def _try_parse_cell_number(text: str) -> Optional[NumericValue]:
    # Cached at ingestion so resolution never re-parses cell contents (many
    # numeric lookups per cell).
    try:
        return parse_quantity(text)
    except QuantityParseError:
        return None


def classify_area(area: int) -> ComplexityBucket:
    if area <= 48:
        return ComplexityBucket.SIMPLE
    if area <= 90:
        return ComplexityBucket.STANDARD
    return ComplexityBucket.COMPLEX


def classify_table_complexity(table: Table) -> ComplexityBucket:
    """Bucket a table by cell area: <=48 simple, 49-90 standard, >90 complex."""
    return classify_area(table.area)


def canonical_bundle_bytes(bundle: Mapping) -> bytes:
    """Stable byte encoding of a bundle, used for content hashing."""
    return json.dumps(
        bundle, sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


def bundle_content_hash(bundle: Mapping) -> str:
    return hashlib.sha256(canonical_bundle_bytes(bundle)).hexdigest()


def _require(condition: bool, message: str):
    if not condition:
        raise ValidationError(message)


def _read_box(raw, where: str) -> Box:
    _require(
        isinstance(raw, (list, tuple)) and len(raw) == 4,
        f"{where}: box must be [x, y, w, h]",
    )
    x, y, w, h = (float(v) for v in raw)
    _require(w >= 0 and h >= 0, f"{where}: box has negative extent")
    return Box(x, y, w, h)


def _check_box_in_page(box: Box, page: PageInfo, where: str):
    slack = 1e-9 * max(page.width, page.height, 1.0)
    _require(
        box.x >= -slack
        and box.y >= -slack
        and box.x + box.w <= page.width + slack
        and box.y + box.h <= page.height + slack,
        f"{where}: box {box} outside page {page.index} "
        f"({page.width}x{page.height})",
    )


def ingest_document(bundle: Mapping) -> ParsedDocument:
    """Validate a canonical document bundle and build a ParsedDocument.

    The bundle is a JSON object with exact field names:
    doc_id, pages[{index,width,height}], paragraphs[{id,page,box,text}],
    tables[{id,number,caption,page,box,header_rows,html}].
    """
    _require(isinstance(bundle, Mapping), "bundle must be a JSON object")
    doc_id = bundle.get("doc_id")
    _require(
        isinstance(doc_id, str) and doc_id != "", "doc_id must be a nonempty string"
    )

    raw_pages = bundle.get("pages")
    _require(
        isinstance(raw_pages, Sequence) and len(raw_pages) > 0,
        "pages must be a nonempty list",
    )
    pages = []
    for i, raw in enumerate(raw_pages):
        for key in ("index", "width", "height"):
            _require(key in raw, f"pages[{i}]: missing {key}")
        _require(int(raw["index"]) == i, f"pages[{i}]: indices must be contiguous from 0")
        width, height = float(raw["width"]), float(raw["height"])
        _require(width > 0 and height > 0, f"pages[{i}]: dimensions must be positive")
        pages.append(PageInfo(index=i, width=width, height=height))

    paragraphs = []
    seen_pids: set[str] = set()
    for i, raw in enumerate(bundle.get("paragraphs", [])):
        for key in ("id", "page", "box", "text"):
            _require(key in raw, f"paragraphs[{i}]: missing {key}")
        pid = raw["id"]
        _require(pid not in seen_pids, f"duplicate paragraph id {pid!r}")
        seen_pids.add(pid)
        page = int(raw["page"])
        _require(0 <= page < len(pages), f"paragraph {pid}: page {page} out of range")
        _require(isinstance(raw["text"], str) and raw["text"] != "",
                 f"paragraph {pid}: text must be nonempty")
        box = _read_box(raw["box"], f"paragraph {pid}")
        _check_box_in_page(box, pages[page], f"paragraph {pid}")
        paragraphs.append(Paragraph(id=pid, page=page, box=box, text=raw["text"]))

    tables = []
    seen_tids: set[str] = set()
    for i, raw in enumerate(bundle.get("tables", [])):
        for key in ("id", "number", "caption", "page", "box", "html"):
            _require(key in raw, f"tables[{i}]: missing {key}")
        tid = raw["id"]
        _require(tid not in seen_tids, f"duplicate table id {tid!r}")
        seen_tids.add(tid)
        page = int(raw["page"])
        _require(0 <= page < len(pages), f"table {tid}: page {page} out of range")
        box = _read_box(raw["box"], f"table {tid}")
        _check_box_in_page(box, pages[page], f"table {tid}")
        try:
            grid = parse_table_grid(raw["html"])
        except TableStructureError as exc:
            raise TableStructureError(f"table {tid}: {exc}") from exc
        header_rows = raw.get("header_rows")
        if header_rows is None:
            header_rows = min(1, grid.n_rows - 1)
        tables.append(
            Table(
                id=tid,
                number=int(raw["number"]),
                caption=str(raw["caption"]),
                page=page,
                box=box,
                n_rows=grid.n_rows,
                n_cols=grid.n_cols,
                cells=tuple(_with_geometry(grid, box)),
                header_rows=int(header_rows),
            )
        )

    return ParsedDocument(
        doc_id=doc_id,
        pages=tuple(pages),
        paragraphs=tuple(paragraphs),
        tables=tuple(tables),
        content_hash=bundle_content_hash(bundle),
    )


def _with_geometry(grid: TableGrid, table_box: Box) -> list[Cell]:
    # The bundle carries one box per table; cell geometry is derived by
    # partitioning it uniformly over the grid, merged cells spanning their
    # full extent.
    col_w = table_box.w / grid.n_cols
    row_h = table_box.h / grid.n_rows
    out = []
    for cell in grid.cells:
        box = Box(
            x=table_box.x + cell.col * col_w,
            y=table_box.y + cell.row * row_h,
            w=cell.col_span * col_w,
            h=cell.row_span * row_h,
        )
        out.append(
            Cell(
                id=cell.id,
                row=cell.row,
                col=cell.col,
                row_span=cell.row_span,
                col_span=cell.col_span,
                text=cell.text,
                numeric=cell.numeric,
                box=box,
            )
        )
    return out
