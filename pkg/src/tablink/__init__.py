"""tablink: text-to-table linking engine for scientific documents.

Builds a document-level linking schema (paragraph-table pairs, sentences,
typed mentions and their table targets) from a pre-parsed document bundle,
localizes everything in normalized page coordinates, and serves the result
to a reading overlay.
"""

from .config import PipelineOptions
from .model import (
    Box,
    Cell,
    ComplexityBucket,
    PageInfo,
    Paragraph,
    ParsedDocument,
    Table,
    TableStructureError,
    ValidationError,
    classify_table_complexity,
    ingest_document,
    parse_table_grid,
)
from .pairing import ParagraphTablePair, build_pairs, find_table_references, merge_text_chunks
from .quantity import NumericValue, QuantityParseError, parse_quantity
from .resolution import (
    AlignmentTarget,
    DerivedScope,
    Granularity,
    Mechanism,
    MentionAlignment,
    derived_value_oracle,
    resolve_derived_value,
    resolve_entity,
    resolve_raw_value,
    resolve_sentence,
    resolve_structural,
)
from .mentions import (
    Mention,
    MentionSource,
    MentionType,
    detect_mentions_deterministic,
    validate_mention_spans,
)
from .schema import (
    LinkingSchema,
    NormalizedBox,
    build_schema,
    decode_schema,
    encode_schema,
    normalize_box,
    target_to_boxes,
)
from .scopes import SentenceAlignment, merge_targets
from .segmentation import Sentence, segment_sentences
from .evaluation import ScoreReport, score_detection, score_resolution, span_iou

__version__ = "0.1.0"

__all__ = [
    "AlignmentTarget",
    "Box",
    "Cell",
    "ComplexityBucket",
    "DerivedScope",
    "Granularity",
    "LinkingSchema",
    "Mechanism",
    "Mention",
    "MentionAlignment",
    "MentionSource",
    "MentionType",
    "NormalizedBox",
    "NumericValue",
    "PageInfo",
    "Paragraph",
    "ParagraphTablePair",
    "ParsedDocument",
    "PipelineOptions",
    "QuantityParseError",
    "ScoreReport",
    "Sentence",
    "SentenceAlignment",
    "Table",
    "TableStructureError",
    "ValidationError",
    "build_pairs",
    "build_schema",
    "classify_table_complexity",
    "decode_schema",
    "derived_value_oracle",
    "detect_mentions_deterministic",
    "encode_schema",
    "find_table_references",
    "ingest_document",
    "merge_targets",
    "merge_text_chunks",
    "normalize_box",
    "parse_quantity",
    "parse_table_grid",
    "resolve_derived_value",
    "resolve_entity",
    "resolve_raw_value",
    "resolve_sentence",
    "resolve_structural",
    "score_detection",
    "score_resolution",
    "segment_sentences",
    "span_iou",
    "target_to_boxes",
    "validate_mention_spans",
]
