"""Document-level linking schema: assembly, normalized coordinates and a
byte-stable codec.

The schema file is the contract between this engine and the reading overlay:
one JSON object, fixed key order, box fractions printed with six decimal
places so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from .config import PipelineOptions
from .inference import InferenceClient, InferenceError, detect_mentions_remote
from .mentions import (
    MentionType,
    combine_mentions,
    default_cues,
    detect_mentions_deterministic,
    load_cues,
)
from .model import Box, PageInfo, Paragraph, ParsedDocument, Table
from .pairing import build_pairs, merge_text_chunks
from .resolution import (
    AlignmentTarget,
    Granularity,
    Mechanism,
    resolve_sentence,
)
from .scopes import merge_targets
from .segmentation import Sentence, default_abbreviations, load_abbreviations, segment_sentences

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
FRACTION_DIGITS = 6


class GeometryError(ValueError):
    """Page dimensions unusable for coordinate normalization."""


class SchemaFormatError(ValueError):
    """Schema bytes do not decode to a supported schema."""


@dataclass(frozen=True)
class NormalizedBox:
    """Rectangle in page fractions, origin top-left, y growing downward."""

    page: int
    x: float
    y: float
    w: float
    h: float

    def quantized(self) -> "NormalizedBox":
        x = round(self.x, FRACTION_DIGITS) + 0.0
        y = round(self.y, FRACTION_DIGITS) + 0.0
        w = round(self.w, FRACTION_DIGITS) + 0.0
        h = round(self.h, FRACTION_DIGITS) + 0.0
        # rounding may push the far edge past 1 by half an ulp of the grid
        if x + w > 1.0:
            w = round(1.0 - x, FRACTION_DIGITS)
        if y + h > 1.0:
            h = round(1.0 - y, FRACTION_DIGITS)
        return NormalizedBox(self.page, x, y, w, h)


def normalize_box(abs_box: Box, page: PageInfo) -> NormalizedBox:
    """Convert an absolute rectangle to page fractions.

    Rectangles reaching outside the page are clamped (with a warning);
    non-positive page dimensions are an error.
    """
    if page.width <= 0 or page.height <= 0:
        raise GeometryError(
            f"page {page.index} has non-positive dimensions "
            f"{page.width}x{page.height}"
        )
    x = abs_box.x / page.width
    y = abs_box.y / page.height
    w = abs_box.w / page.width
    h = abs_box.h / page.height
    if x < 0 or y < 0 or x + w > 1 or y + h > 1:
        log.warning(
            "box %s exceeds page %d bounds; clamping", abs_box, page.index
        )
        x = min(max(x, 0.0), 1.0)
        y = min(max(y, 0.0), 1.0)
        w = min(max(w, 0.0), 1.0 - x)
        h = min(max(h, 0.0), 1.0 - y)
    return NormalizedBox(page=page.index, x=x, y=y, w=w, h=h)


def denormalize_box(nbox: NormalizedBox, page: PageInfo) -> Box:
    return Box(
        x=nbox.x * page.width,
        y=nbox.y * page.height,
        w=nbox.w * page.width,
        h=nbox.h * page.height,
    )


def target_to_boxes(
    target: AlignmentTarget, table: Table, page: PageInfo
) -> list[NormalizedBox]:
    """Rendering boxes for a target: rows/columns/regions collapse to one
    union rectangle, cell sets give one box per cell."""
    if target.granularity is Granularity.CELL:
        boxes = []
        for cid in target.cells:
            cell = table.cell_by_id(cid)
            boxes.append(normalize_box(cell.box, page).quantized())
        return boxes
    covered = {table.cell_at(r, c).id for (r, c) in target.covered_positions(table)}
    union: Optional[Box] = None
    for cid in sorted(covered):
        box = table.cell_by_id(cid).box
        union = box if union is None else union.union(box)
    if union is None:
        return []
    return [normalize_box(union, page).quantized()]


def sentence_box(sentence: Sentence, paragraph: Paragraph, page: PageInfo) -> NormalizedBox:
    """Approximate sentence geometry as a proportional vertical slice of the
    paragraph box (the bundle does not carry character-level geometry)."""
    total = max(len(paragraph.text), 1)
    start, end = sentence.span
    frac0 = start / total
    frac1 = end / total
    abs_box = Box(
        x=paragraph.box.x,
        y=paragraph.box.y + paragraph.box.h * frac0,
        w=paragraph.box.w,
        h=paragraph.box.h * (frac1 - frac0),
    )
    return normalize_box(abs_box, page).quantized()


# ---------------------------------------------------------------------------
# schema model


@dataclass(frozen=True)
class SchemaMention:
    id: str
    span: tuple[int, int]
    mtype: MentionType
    mechanism: Mechanism
    evidence: dict
    target: AlignmentTarget
    boxes: tuple[NormalizedBox, ...]


@dataclass(frozen=True)
class SchemaRegion:
    target: AlignmentTarget
    boxes: tuple[NormalizedBox, ...]


@dataclass(frozen=True)
class SchemaSentence:
    id: str
    span: tuple[int, int]
    sentence_boxes: tuple[NormalizedBox, ...]
    regions: tuple[SchemaRegion, ...]
    mentions: tuple[SchemaMention, ...]


@dataclass(frozen=True)
class SchemaPair:
    paragraph_id: str
    table_id: str
    reference_spans: tuple[tuple[int, int], ...]
    sentences: tuple[SchemaSentence, ...]


@dataclass(frozen=True)
class LinkingSchema:
    version: str
    doc_id: str
    content_hash: str
    pairs: tuple[SchemaPair, ...]
    warnings: tuple[str, ...] = ()
    gold: bool = False


# ---------------------------------------------------------------------------
# pipeline


def build_schema(
    doc: ParsedDocument,
    options: Optional[PipelineOptions] = None,
    client: Optional[InferenceClient] = None,
) -> LinkingSchema:
    """Run the full pipeline: pair, segment, detect, resolve, merge, localize.

    Deterministic for fixed options and a deterministic backend; remote
    failures degrade to deterministic-only output with a warning record.
    """
    options = options or PipelineOptions()
    abbreviations = (
        load_abbreviations(options.abbreviations_path)
        if options.abbreviations_path
        else default_abbreviations()
    )
    cues = load_cues(options.cues_path) if options.cues_path else default_cues()

    doc = replace(doc, paragraphs=tuple(merge_text_chunks(list(doc.paragraphs))))
    warnings: list[str] = []
    remote_down = False

    pairs_out = []
    for pair in build_pairs(doc):
        paragraph = doc.paragraph_by_id(pair.paragraph_id)
        table = doc.table_by_id(pair.table_id)
        text_page = doc.pages[paragraph.page]
        table_page = doc.pages[table.page]

        sentences_out = []
        for sentence in segment_sentences(paragraph, abbreviations):
            mentions = detect_mentions_deterministic(sentence, table, cues)
            bound_client = None
            if client is not None and not remote_down:
                try:
                    remote = detect_mentions_remote(
                        sentence, table, client, paragraph_text=paragraph.text
                    )
                    mentions = combine_mentions(mentions, remote)
                    bound_client = client.bind(sentence)
                except InferenceError as exc:
                    remote_down = True
                    warnings.append(f"remote backend degraded: {exc}")
                    log.warning("remote detection failed, continuing offline: %s", exc)
            alignments = resolve_sentence(
                mentions,
                table,
                client=bound_client,
                approx_rel_tol=options.approx_rel_tol,
            )
            aligned_ids = {a.mention_id for a in alignments}
            by_id = {a.mention_id: a for a in alignments}
            merged = merge_targets(alignments, table, sentence_id=sentence.id)

            mention_rows = []
            for mention in mentions:
                if mention.id not in aligned_ids:
                    continue
                alignment = by_id[mention.id]
                mention_rows.append(
                    SchemaMention(
                        id=mention.id,
                        span=mention.span,
                        mtype=mention.mtype,
                        mechanism=alignment.mechanism,
                        evidence=alignment.evidence,
                        target=alignment.target,
                        boxes=tuple(target_to_boxes(alignment.target, table, table_page)),
                    )
                )
            sentences_out.append(
                SchemaSentence(
                    id=sentence.id,
                    span=sentence.span,
                    sentence_boxes=(sentence_box(sentence, paragraph, text_page),),
                    regions=tuple(
                        SchemaRegion(
                            target=region,
                            boxes=tuple(target_to_boxes(region, table, table_page)),
                        )
                        for region in merged.regions
                    ),
                    mentions=tuple(mention_rows),
                )
            )
        pairs_out.append(
            SchemaPair(
                paragraph_id=pair.paragraph_id,
                table_id=pair.table_id,
                reference_spans=pair.reference_spans,
                sentences=tuple(sentences_out),
            )
        )

    return LinkingSchema(
        version=SCHEMA_VERSION,
        doc_id=doc.doc_id,
        content_hash=doc.content_hash,
        pairs=tuple(pairs_out),
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# canonical codec


def _target_to_json(target: AlignmentTarget) -> dict:
    if target.granularity is Granularity.CELL:
        return {"granularity": "cell", "cells": list(target.cells)}
    if target.granularity is Granularity.ROW:
        return {"granularity": "row", "row": target.row}
    if target.granularity is Granularity.COLUMN:
        return {"granularity": "column", "col": target.col}
    return {"granularity": "region", "rect": list(target.rect)}


def _target_from_json(raw: dict) -> AlignmentTarget:
    gran = Granularity(raw["granularity"])
    if gran is Granularity.CELL:
        return AlignmentTarget(gran, cells=tuple(raw["cells"]))
    if gran is Granularity.ROW:
        return AlignmentTarget(gran, row=int(raw["row"]))
    if gran is Granularity.COLUMN:
        return AlignmentTarget(gran, col=int(raw["col"]))
    r0, r1, c0, c1 = (int(v) for v in raw["rect"])
    return AlignmentTarget(gran, rect=(r0, r1, c0, c1))


def _box_to_json(box: NormalizedBox) -> dict:
    return {"page": box.page, "x": box.x, "y": box.y, "w": box.w, "h": box.h}


def _box_from_json(raw: dict) -> NormalizedBox:
    return NormalizedBox(
        page=int(raw["page"]),
        x=float(raw["x"]),
        y=float(raw["y"]),
        w=float(raw["w"]),
        h=float(raw["h"]),
    )


def schema_to_dict(schema: LinkingSchema) -> dict:
    out = {
        "version": schema.version,
        "doc_id": schema.doc_id,
        "content_hash": schema.content_hash,
        "pairs": [
            {
                "paragraph_id": pair.paragraph_id,
                "table_id": pair.table_id,
                "reference_spans": [list(s) for s in pair.reference_spans],
                "sentences": [
                    {
                        "id": s.id,
                        "span": list(s.span),
                        "sentence_boxes": [_box_to_json(b) for b in s.sentence_boxes],
                        "regions": [
                            {
                                "target": _target_to_json(r.target),
                                "boxes": [_box_to_json(b) for b in r.boxes],
                            }
                            for r in s.regions
                        ],
                        "mentions": [
                            {
                                "id": m.id,
                                "span": list(m.span),
                                "type": m.mtype.value,
                                "mechanism": m.mechanism.value,
                                "evidence": m.evidence,
                                "target": _target_to_json(m.target),
                                "boxes": [_box_to_json(b) for b in m.boxes],
                            }
                            for m in s.mentions
                        ],
                    }
                    for s in pair.sentences
                ],
            }
            for pair in schema.pairs
        ],
        "warnings": list(schema.warnings),
    }
    if schema.gold:
        out["gold"] = True
    return out


def schema_from_dict(raw: dict) -> LinkingSchema:
    if not isinstance(raw, dict):
        raise SchemaFormatError("schema must be a JSON object")
    version = raw.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaFormatError(f"unsupported schema version: {version!r}")
    pairs = []
    for rp in raw.get("pairs", []):
        sentences = []
        for rs in rp["sentences"]:
            sentences.append(
                SchemaSentence(
                    id=rs["id"],
                    span=tuple(rs["span"]),
                    sentence_boxes=tuple(_box_from_json(b) for b in rs["sentence_boxes"]),
                    regions=tuple(
                        SchemaRegion(
                            target=_target_from_json(r["target"]),
                            boxes=tuple(_box_from_json(b) for b in r["boxes"]),
                        )
                        for r in rs["regions"]
                    ),
                    mentions=tuple(
                        SchemaMention(
                            id=m["id"],
                            span=tuple(m["span"]),
                            mtype=MentionType(m["type"]),
                            mechanism=Mechanism(m["mechanism"]),
                            evidence=m["evidence"],
                            target=_target_from_json(m["target"]),
                            boxes=tuple(_box_from_json(b) for b in m["boxes"]),
                        )
                        for m in rs["mentions"]
                    ),
                )
            )
        pairs.append(
            SchemaPair(
                paragraph_id=rp["paragraph_id"],
                table_id=rp["table_id"],
                reference_spans=tuple(tuple(s) for s in rp["reference_spans"]),
                sentences=tuple(sentences),
            )
        )
    return LinkingSchema(
        version=version,
        doc_id=raw["doc_id"],
        content_hash=raw["content_hash"],
        pairs=tuple(pairs),
        warnings=tuple(raw.get("warnings", ())),
        gold=bool(raw.get("gold", False)),
    )


def _emit(value, out: list[str]):
    if value is None or isinstance(value, bool):
        out.append("null" if value is None else ("true" if value else "false"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise SchemaFormatError(f"non-finite number in schema: {value}")
        if value == round(value, FRACTION_DIGITS):
            out.append(f"{value:.{FRACTION_DIGITS}f}")
        else:
            out.append(repr(value))
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _emit(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    else:
        raise SchemaFormatError(f"unserializable value in schema: {value!r}")


def encode_schema(schema: LinkingSchema) -> bytes:
    """Canonical byte encoding: declared key order, fractions at 6 decimal
    places, no whitespace. Encoding the same schema twice is byte-identical."""
    out: list[str] = []
    _emit(schema_to_dict(schema), out)
    return "".join(out).encode("utf-8")


def decode_schema(data: bytes | str, doc: Optional[ParsedDocument] = None) -> LinkingSchema:
    """Decode schema bytes; with a document supplied, also check referential
    integrity (every id in the schema exists in the document)."""
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaFormatError(f"schema is not valid JSON: {exc}") from exc
    schema = schema_from_dict(raw)
    if doc is not None:
        validate_schema_ids(schema, doc)
    return schema


def validate_schema_ids(schema: LinkingSchema, doc: ParsedDocument):
    paragraphs = {p.id: p for p in doc.paragraphs}
    for pair in schema.pairs:
        paragraph = paragraphs.get(pair.paragraph_id)
        if paragraph is None:
            raise SchemaFormatError(f"unknown paragraph id {pair.paragraph_id!r}")
        try:
            table = doc.table_by_id(pair.table_id)
        except KeyError:
            raise SchemaFormatError(f"unknown table id {pair.table_id!r}") from None
        for sentence in pair.sentences:
            s0, s1 = sentence.span
            if not (0 <= s0 < s1 <= len(paragraph.text)):
                raise SchemaFormatError(
                    f"sentence {sentence.id}: span {sentence.span} outside paragraph"
                )
            for mention in sentence.mentions:
                m0, m1 = mention.span
                if not (0 <= m0 < m1 <= s1 - s0):
                    raise SchemaFormatError(
                        f"mention {mention.id}: span {mention.span} outside sentence"
                    )
                try:
                    mention.target.validate_for(table)
                except ValueError as exc:
                    raise SchemaFormatError(
                        f"mention {mention.id}: invalid target ({exc})"
                    ) from exc
            for region in sentence.regions:
                try:
                    region.target.validate_for(table)
                except ValueError as exc:
                    raise SchemaFormatError(f"invalid region target ({exc})") from exc
