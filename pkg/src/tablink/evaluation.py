"""Scoring of predicted schemas against gold annotations.

Detection is span matching (greedy one-to-one by descending IoU, threshold
0.5); resolution is all-or-nothing equality of covered cell sets, reported
overall and per table-complexity bucket.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .model import ComplexityBucket, ParsedDocument, Table, classify_table_complexity
from .resolution import AlignmentTarget
from .schema import LinkingSchema

log = logging.getLogger(__name__)

Span = tuple[int, int]

DETECTION_IOU_THRESHOLD = 0.5


def span_iou(a: Span, b: Span) -> float:
    """Intersection over union of two half-open character intervals."""
    inter = max(0, min(a[1], b[1]) - max(a[0], b[0]))
    union = max(0, a[1] - a[0]) + max(0, b[1] - b[0]) - inter
    if union <= 0:
        return 0.0
    return inter / union


@dataclass(frozen=True)
class SpanItem:
    """A mention span keyed to its sentence, the unit of detection scoring."""

    sentence_id: str
    span: Span


@dataclass
class DetectionScores:
    precision: float
    recall: float
    f1: float
    true_positives: int
    false_positives: int
    false_negatives: int
    matches: list[tuple[SpanItem, SpanItem, float]] = field(default_factory=list)


@dataclass
class ResolutionScores:
    accuracy: float
    correct: int
    total: int
    per_bucket: dict[ComplexityBucket, tuple[int, int]] = field(default_factory=dict)

    def bucket_accuracy(self, bucket: ComplexityBucket) -> Optional[float]:
        if bucket not in self.per_bucket:
            return None
        correct, total = self.per_bucket[bucket]
        return correct / total if total else None


@dataclass
class ScoreReport:
    detection: DetectionScores
    resolution: ResolutionScores


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def score_detection(
    pred: Sequence[SpanItem],
    gold: Sequence[SpanItem],
    threshold: float = DETECTION_IOU_THRESHOLD,
) -> DetectionScores:
    """Greedy one-to-one matching by descending IoU within each sentence.

    Conventions: empty pred and gold scores all ones; an empty side scores
    its own ratio as 1 but F1 still collapses to 0 through the other ratio.
    """
    if not pred and not gold:
        return DetectionScores(1.0, 1.0, 1.0, 0, 0, 0)

    scored_pairs = []
    for i, p in enumerate(pred):
        for j, g in enumerate(gold):
            if p.sentence_id != g.sentence_id:
                continue
            iou = span_iou(p.span, g.span)
            if iou >= threshold:
                scored_pairs.append((-iou, i, j))
    scored_pairs.sort()
    matched_pred: set[int] = set()
    matched_gold: set[int] = set()
    matches = []
    for neg_iou, i, j in scored_pairs:
        if i in matched_pred or j in matched_gold:
            continue
        matched_pred.add(i)
        matched_gold.add(j)
        matches.append((pred[i], gold[j], -neg_iou))

    tp = len(matches)
    precision = tp / len(pred) if pred else 1.0
    recall = tp / len(gold) if gold else 1.0
    return DetectionScores(
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        true_positives=tp,
        false_positives=len(pred) - tp,
        false_negatives=len(gold) - tp,
        matches=matches,
    )


def score_resolution(
    pred: Mapping[str, AlignmentTarget],
    gold: Mapping[str, AlignmentTarget],
    tables: Mapping[str, Table],
) -> ResolutionScores:
    """All-or-nothing accuracy over gold mentions: a prediction is correct
    only when its covered cell set equals the gold one exactly. Predictions
    for unknown mention ids are logged and counted wrong."""
    per_bucket: dict[ComplexityBucket, list[int]] = {}
    correct = 0
    total = 0

    extras = set(pred) - set(gold)
    for mention_id in sorted(extras):
        log.warning("prediction for unknown mention id %r counted incorrect", mention_id)
        bucket = classify_table_complexity(tables[mention_id])
        per_bucket.setdefault(bucket, [0, 0])[1] += 1
        total += 1

    for mention_id in gold:
        table = tables[mention_id]
        bucket = classify_table_complexity(table)
        counts = per_bucket.setdefault(bucket, [0, 0])
        total += 1
        counts[1] += 1
        p = pred.get(mention_id)
        if p is None:
            continue
        if p.covered_cells(table) == gold[mention_id].covered_cells(table):
            correct += 1
            counts[0] += 1

    return ResolutionScores(
        accuracy=correct / total if total else 1.0,
        correct=correct,
        total=total,
        per_bucket={b: (c, t) for b, (c, t) in per_bucket.items()},
    )


# ---------------------------------------------------------------------------
# schema-level harness


@dataclass
class GoldAnnotation:
    """Flattened view of a (gold) schema: spans for detection, targets and
    their tables for resolution."""

    spans: list[SpanItem]
    targets: dict[str, AlignmentTarget]
    tables: dict[str, Table]


def annotation_from_schema(schema: LinkingSchema, doc: ParsedDocument) -> GoldAnnotation:
    spans: list[SpanItem] = []
    targets: dict[str, AlignmentTarget] = {}
    tables: dict[str, Table] = {}
    for pair in schema.pairs:
        table = doc.table_by_id(pair.table_id)
        for sentence in pair.sentences:
            for mention in sentence.mentions:
                spans.append(SpanItem(sentence_id=sentence.id, span=mention.span))
                targets[mention.id] = mention.target
                tables[mention.id] = table
    return GoldAnnotation(spans=spans, targets=targets, tables=tables)


def score_schemas(
    pred: LinkingSchema,
    gold: LinkingSchema,
    doc: ParsedDocument,
    threshold: float = DETECTION_IOU_THRESHOLD,
) -> ScoreReport:
    if not gold.gold:
        log.warning("gold schema lacks the gold flag; scoring anyway")
    pred_ann = annotation_from_schema(pred, doc)
    gold_ann = annotation_from_schema(gold, doc)
    detection = score_detection(pred_ann.spans, gold_ann.spans, threshold)
    resolution = score_resolution(
        pred_ann.targets, gold_ann.targets, {**pred_ann.tables, **gold_ann.tables}
    )
    return ScoreReport(detection=detection, resolution=resolution)


def report_to_json(report: ScoreReport) -> dict:
    return {
        "detection": {
            "precision": report.detection.precision,
            "recall": report.detection.recall,
            "f1": report.detection.f1,
            "true_positives": report.detection.true_positives,
            "false_positives": report.detection.false_positives,
            "false_negatives": report.detection.false_negatives,
        },
        "resolution": {
            "accuracy": report.resolution.accuracy,
            "correct": report.resolution.correct,
            "total": report.resolution.total,
            "buckets": {
                bucket.value: {
                    "correct": counts[0],
                    "total": counts[1],
                    "accuracy": counts[0] / counts[1] if counts[1] else None,
                }
                for bucket, counts in sorted(
                    report.resolution.per_bucket.items(), key=lambda kv: kv[0].value
                )
            },
        },
    }


def format_report(report: ScoreReport) -> str:
    """Aligned plain-text rendering of a score report."""
    det = report.detection
    res = report.resolution
    rows = [
        ("detection precision", f"{det.precision:.3f}", f"tp={det.true_positives} fp={det.false_positives}"),
        ("detection recall", f"{det.recall:.3f}", f"fn={det.false_negatives}"),
        ("detection f1", f"{det.f1:.3f}", ""),
        ("resolution accuracy", f"{res.accuracy:.3f}", f"{res.correct}/{res.total}"),
    ]
    for bucket in (ComplexityBucket.SIMPLE, ComplexityBucket.STANDARD, ComplexityBucket.COMPLEX):
        if bucket in res.per_bucket:
            c, t = res.per_bucket[bucket]
            rows.append((f"  {bucket.value} tables", f"{c / t:.3f}" if t else "-", f"{c}/{t}"))
    width = max(len(r[0]) for r in rows)
    lines = [f"{name:<{width}}  {value:>7}  {extra}".rstrip() for name, value, extra in rows]
    return "\n".join(lines)


def dump_report(report: ScoreReport) -> str:
    return json.dumps(report_to_json(report), indent=2, ensure_ascii=False)
