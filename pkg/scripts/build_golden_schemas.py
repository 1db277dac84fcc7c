#!/usr/bin/env python3
"""Build linking schemas for the bundled mini-documents and print a short
pipeline summary for each. With --out DIR the canonical schema bytes are
written there (the reader overlay's test fixtures are produced this way).

Usage: python scripts/build_golden_schemas.py [--out DIR]
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tablink.model import ingest_document
from tablink.schema import build_schema, encode_schema

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
BUNDLES = ["fewshot_qa", "multitask", "model_scale"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", help="directory to write <name>.schema.json files")
    args = parser.parse_args()

    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    for name in BUNDLES:
        with open(FIXTURES / f"{name}.bundle.json", encoding="utf-8") as fh:
            bundle = json.load(fh)
        doc = ingest_document(bundle)
        started = time.perf_counter()
        schema = build_schema(doc)
        elapsed = (time.perf_counter() - started) * 1000

        n_sentences = sum(len(p.sentences) for p in schema.pairs)
        n_mentions = sum(len(s.mentions) for p in schema.pairs for s in p.sentences)
        n_regions = sum(len(s.regions) for p in schema.pairs for s in p.sentences)
        print(
            f"{name}: {len(schema.pairs)} pairs, {n_sentences} sentences, "
            f"{n_mentions} mentions, {n_regions} regions ({elapsed:.1f} ms)"
        )
        for pair in schema.pairs:
            table = doc.table_by_id(pair.table_id)
            for sentence in pair.sentences:
                for mention in sentence.mentions:
                    detail = mention.evidence.get("operation") or mention.evidence.get(
                        "tier", mention.evidence.get("match_role", "")
                    )
                    print(
                        f"  {mention.id} [{mention.mtype.value}/{mention.mechanism.value}"
                        f"{'/' + detail if detail else ''}] -> "
                        f"{sorted(mention.target.covered_cells(table))[:4]}"
                    )
        if out_dir:
            path = out_dir / f"{name}.schema.json"
            path.write_bytes(encode_schema(schema))
            print(f"  wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
