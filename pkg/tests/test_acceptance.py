"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Criteria:
  1. golden-fixture reproduction (three transcribed mini-documents)
  2. oracle equivalence on 200 random numeric tables
  3. metric-harness fidelity against hand-computed values
  4. reference aggregate reconstruction from synthetic confusion counts
  5. property suites at >=1000 randomized cases (home modules + cache
     determinism here)
"""

import json
import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from tablink.evaluation import (
    SpanItem,
    score_detection,
    score_resolution,
    span_iou,
)
from tablink.mentions import Mention, MentionSource, MentionType
from tablink.model import ComplexityBucket, classify_area, ingest_document
from tablink.quantity import parse_quantity, round_half_up
from tablink.resolution import (
    AlignmentTarget,
    DerivedScope,
    derived_value_oracle,
    resolve_derived_value,
)
from tablink.schema import build_schema
from tablink.service import SchemaStore

from .conftest import grid_html, load_bundle, make_bundle
from .strategies import small_bundles


def _passed(name):
    print(f"[PASS] {name}")


# ---------------------------------------------------------------------------
# 1. golden-fixture reproduction


def _schema_mentions(schema):
    return [m for p in schema.pairs for s in p.sentences for m in s.mentions]


def _cell_texts(table, target):
    return {table.cell_by_id(c).text for c in target.cells}


def test_golden_fixture_reproduction():
    started = time.perf_counter()

    # (a) derived improvement resolves to its two evidence cells, by difference
    doc = ingest_document(load_bundle("fewshot_qa"))
    table = doc.tables[0]
    schema = build_schema(doc)
    derived_mentions = [
        m for m in _schema_mentions(schema) if m.mtype == MentionType.DERIVED_VALUE
    ]
    assert len(derived_mentions) == 1
    derived = derived_mentions[0]
    assert _cell_texts(table, derived.target) == {"85.1", "72.6"}
    assert derived.evidence["operation"] == "difference"

    # (b) the two-source-cell pair for the column improvement
    doc = ingest_document(load_bundle("multitask"))
    table = doc.tables[0]
    schema = build_schema(doc)
    derived_targets = {
        frozenset(_cell_texts(table, m.target))
        for m in _schema_mentions(schema)
        if m.mtype == MentionType.DERIVED_VALUE
    }
    assert frozenset({"53.92", "42.71"}) in derived_targets
    assert frozenset({"53.92", "45.48"}) in derived_targets

    # (c) entity row, scale-normalized exact value, approximate scale pairing
    doc = ingest_document(load_bundle("model_scale"))
    table = doc.tables[0]
    schema = build_schema(doc)
    mentions = _schema_mentions(schema)

    entity = next(m for m in mentions if m.mtype == MentionType.NAMED_ENTITY and "Megatron" in json.dumps(m.evidence))
    megatron_row = next(c for c in table.cells if c.text == "MegatronLM").row
    assert entity.target.row == megatron_row

    def raw_near(value):
        return next(
            m
            for m in mentions
            if m.mtype == MentionType.RAW_VALUE
            and abs(m.evidence["value"] - value) <= 1e-6 * value
        )

    big = raw_near(8.3e9)
    assert _cell_texts(table, big.target) == {"8.30E+09"}
    assert big.evidence["tier"] == "exact"
    sparse = raw_near(1.6e12)
    assert _cell_texts(table, sparse.target) == {"1.57E+12"}
    assert sparse.evidence["tier"] == "approximate"

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"fixture run took {elapsed:.3f}s"
    _passed(f"golden-fixture reproduction ({elapsed * 1000:.0f} ms)")


# ---------------------------------------------------------------------------
# 2. oracle equivalence on 200 random tables


def _random_numeric_table(rng):
    n_rows = rng.randint(2, 12)
    n_cols = rng.randint(1, 12)
    rows = [[f"h{c}" for c in range(n_cols)]]
    for r in range(1, n_rows):
        rows.append([f"{rng.uniform(0.1, 500.0):.2f}" for _ in range(n_cols)])
    grid = grid_html(rows)
    doc = ingest_document(make_bundle(tables=[(1, grid)]))
    return doc.tables[0]


def _mention(text, mtype):
    return Mention(
        id="m0",
        sentence_id="s0",
        text=text,
        span=(0, len(text)),
        mtype=mtype,
        source=MentionSource.DETERMINISTIC,
    )


def test_oracle_equivalence_200_tables():
    rng = random.Random(20250810)
    ops = ("difference", "absolute_difference", "percent_change", "ratio")
    containment = 0
    rank1_checked = 0
    rank1_equal = 0
    cases = 0
    while cases < 200:
        table = _random_numeric_table(rng)
        numeric = [c for c in table.cells if c.numeric is not None]
        if len(numeric) < 2:
            continue
        a, b = rng.sample(numeric, 2)
        op = rng.choice(ops)
        if op == "difference":
            computed = a.numeric.magnitude - b.numeric.magnitude
        elif op == "absolute_difference":
            computed = abs(a.numeric.magnitude - b.numeric.magnitude)
        elif op == "percent_change":
            computed = 100.0 * (a.numeric.magnitude - b.numeric.magnitude) / b.numeric.magnitude
        else:
            computed = a.numeric.magnitude / b.numeric.magnitude
        text = f"{round_half_up(computed, 2):.2f}"
        cases += 1

        value = parse_quantity(text)
        alignment = resolve_derived_value(_mention(text, MentionType.DERIVED_VALUE), table)
        assert alignment is not None, "injected target must resolve"
        whole = derived_value_oracle(value, table, DerivedScope.WHOLE_TABLE)
        pairs = {frozenset((c.cell_a, c.cell_b)) for c in whole}
        chosen = frozenset(alignment.target.cells)
        assert chosen in pairs, "chosen pair must come from the oracle"
        containment += 1

        if len(whole) == 1:
            rank1_checked += 1
            if chosen == frozenset((whole[0].cell_a, whole[0].cell_b)):
                rank1_equal += 1
        # scope escalation mirrors the whole-table ordering even when
        # ambiguous, since same-column candidates sort first in both
        assert chosen == frozenset((whole[0].cell_a, whole[0].cell_b))

    assert containment == 200
    assert rank1_equal == rank1_checked
    _passed(
        f"oracle equivalence (200/200 contained, {rank1_checked} unambiguous all rank-1)"
    )


# ---------------------------------------------------------------------------
# 3. metric-harness fidelity


def test_metric_harness_fidelity():
    tol = 1e-9

    # span_iou on hand-computed intervals
    assert abs(span_iou((0, 4), (0, 4)) - 1.0) < tol
    assert abs(span_iou((0, 4), (10, 12)) - 0.0) < tol
    assert abs(span_iou((0, 10), (5, 15)) - 5.0 / 15.0) < tol

    # detection: 10 gold vs 10 pred; by hand: 6 exact + 1 overlap at
    # IoU 8/12 >= 0.5 match -> TP=7, P=R=0.7, F1=0.7
    gold, pred = [], []
    for i in range(6):
        gold.append(SpanItem(f"s{i}", (0, 10)))
        pred.append(SpanItem(f"s{i}", (0, 10)))
    gold.append(SpanItem("s6", (0, 10)))
    pred.append(SpanItem("s6", (2, 12)))
    for i in range(7, 10):
        gold.append(SpanItem(f"s{i}", (0, 10)))
        pred.append(SpanItem(f"s{i}", (50, 60)))
    detection = score_detection(pred, gold)
    assert abs(detection.precision - 0.7) < tol
    assert abs(detection.recall - 0.7) < tol
    assert abs(detection.f1 - 0.7) < tol

    # resolution: 10 mentions, hand-count 3/4 + 2/3 + 2/3 = 7/10
    def bucket_table(n_rows, n_cols):
        rows = [[f"v{r}{c}" for c in range(n_cols)] for r in range(n_rows)]
        doc = ingest_document(make_bundle(tables=[(1, grid_html(rows))]))
        return doc.tables[0]

    tables = {
        ComplexityBucket.SIMPLE: bucket_table(4, 4),
        ComplexityBucket.STANDARD: bucket_table(7, 8),
        ComplexityBucket.COMPLEX: bucket_table(10, 10),
    }
    gold_targets, pred_targets, table_map = {}, {}, {}
    plan = [
        (ComplexityBucket.SIMPLE, 4, 3),
        (ComplexityBucket.STANDARD, 3, 2),
        (ComplexityBucket.COMPLEX, 3, 2),
    ]
    i = 0
    for bucket, total, n_correct in plan:
        for k in range(total):
            mid = f"m{i}"
            i += 1
            gold_targets[mid] = AlignmentTarget.for_cells([f"r1c{k}"])
            pred_targets[mid] = (
                gold_targets[mid] if k < n_correct else AlignmentTarget.for_cells([f"r2c{k}"])
            )
            table_map[mid] = tables[bucket]
    resolution = score_resolution(pred_targets, gold_targets, table_map)
    assert abs(resolution.accuracy - 0.7) < tol
    assert resolution.per_bucket[ComplexityBucket.SIMPLE] == (3, 4)
    assert resolution.per_bucket[ComplexityBucket.STANDARD] == (2, 3)
    assert resolution.per_bucket[ComplexityBucket.COMPLEX] == (2, 3)

    # bucket boundaries exact at the declared edges
    assert classify_area(48) == ComplexityBucket.SIMPLE
    assert classify_area(49) == ComplexityBucket.STANDARD
    assert classify_area(90) == ComplexityBucket.STANDARD
    assert classify_area(91) == ComplexityBucket.COMPLEX

    _passed("metric-harness fidelity (1e-9)")


# ---------------------------------------------------------------------------
# 4. reference aggregate reconstruction
#
# The reference end-to-end numbers (P 82.3, R 86.3, F1 84.3; resolution 75.4;
# buckets 87.9 / 73.1 / 62.0) come from a private annotated corpus and a
# hosted model, so they cannot be recomputed here. The harness is instead fed
# a synthetic prediction set realizing confusion counts derived in
# scripts/derive_eval_counts.py: TP=88 FP=19 FN=14; buckets 29/33, 38/52,
# 13/21 (overall 80/106).


def test_reference_aggregate_reconstruction():
    tol = 0.001  # 0.1 percentage point

    tp, fp, fn = 88, 19, 14
    pred, gold = [], []
    for i in range(tp):
        pred.append(SpanItem(f"s{i}", (0, 10)))
        gold.append(SpanItem(f"s{i}", (0, 10)))
    for i in range(fp):
        pred.append(SpanItem(f"fp{i}", (0, 10)))
    for i in range(fn):
        gold.append(SpanItem(f"fn{i}", (0, 10)))
    detection = score_detection(pred, gold)
    assert abs(detection.precision - 0.823) <= tol
    assert abs(detection.recall - 0.863) <= tol
    assert abs(detection.f1 - 0.843) <= tol

    def bucket_table(n_rows, n_cols):
        rows = [[f"v{r}{c}" for c in range(n_cols)] for r in range(n_rows)]
        doc = ingest_document(make_bundle(tables=[(1, grid_html(rows))]))
        return doc.tables[0]

    tables = {
        ComplexityBucket.SIMPLE: bucket_table(4, 4),
        ComplexityBucket.STANDARD: bucket_table(7, 8),
        ComplexityBucket.COMPLEX: bucket_table(10, 10),
    }
    plan = [
        (ComplexityBucket.SIMPLE, 33, 29),
        (ComplexityBucket.STANDARD, 52, 38),
        (ComplexityBucket.COMPLEX, 21, 13),
    ]
    gold_targets, pred_targets, table_map = {}, {}, {}
    i = 0
    for bucket, total, n_correct in plan:
        for k in range(total):
            mid = f"m{i}"
            i += 1
            gold_targets[mid] = AlignmentTarget.for_cells(["r1c1"])
            pred_targets[mid] = (
                gold_targets[mid] if k < n_correct else AlignmentTarget.for_cells(["r2c2"])
            )
            table_map[mid] = tables[bucket]
    resolution = score_resolution(pred_targets, gold_targets, table_map)
    assert abs(resolution.accuracy - 0.754) <= tol
    assert abs(resolution.bucket_accuracy(ComplexityBucket.SIMPLE) - 0.879) <= tol
    assert abs(resolution.bucket_accuracy(ComplexityBucket.STANDARD) - 0.731) <= tol
    assert abs(resolution.bucket_accuracy(ComplexityBucket.COMPLEX) - 0.620) <= tol

    _passed(
        "reference aggregate reconstruction "
        f"(P={detection.precision:.4f} R={detection.recall:.4f} "
        f"F1={detection.f1:.4f} acc={resolution.accuracy:.4f})"
    )


# ---------------------------------------------------------------------------
# 5. property suites at >=1000 cases


_PROPERTY_SUITES = [
    ("tests.test_segmentation", "test_partition_property"),
    ("tests.test_mentions", "test_substring_soundness_fuzz"),
    ("tests.test_model", "test_grid_coverage_no_overlap"),
    ("tests.test_schema", "test_schema_roundtrip_byte_stability"),
    ("tests.test_schema", "test_normalized_bounds_and_roundtrip"),
    ("tests.test_scopes", "test_merge_coverage_monotonicity"),
    ("tests.test_scopes", "test_merge_idempotence"),
]


def test_property_suites_run_at_1000_cases():
    # the suites themselves run green elsewhere in this pytest session; here
    # we pin that each one is configured for >=1000 randomized cases
    import importlib

    for module_name, test_name in _PROPERTY_SUITES:
        module = importlib.import_module(module_name)
        fn = getattr(module, test_name)
        settings_obj = getattr(fn, "_hypothesis_internal_use_settings", None)
        assert settings_obj is not None, f"{test_name} is not a hypothesis property"
        assert settings_obj.max_examples >= 1000, (
            f"{module_name}.{test_name} runs at {settings_obj.max_examples} cases"
        )
    _passed("property suites configured at >=1000 randomized cases")


@pytest.fixture(scope="module")
def cache_store_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("cache-determinism")


@settings(max_examples=1000, deadline=None)
@given(bundle=small_bundles())
def test_cache_determinism(bundle, cache_store_dir):
    # double submit of any bundle yields byte-identical schemas
    store = SchemaStore(cache_store_dir)
    first = store.submit(bundle, wait=True)
    assert first.state.value in ("done",)
    bytes_a = store.schema_bytes(bundle["doc_id"])
    second = store.submit(bundle, wait=True)
    bytes_b = store.schema_bytes(bundle["doc_id"])
    assert second.schema_id == first.schema_id
    assert bytes_a == bytes_b and bytes_a is not None


def test_cache_determinism_passline():
    _passed("cache determinism (double submit -> identical bytes, 1000 cases)")
