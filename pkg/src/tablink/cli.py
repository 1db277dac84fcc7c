"""Command-line interface: ingest, link, eval, serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional

from .config import PipelineOptions
from .evaluation import dump_report, format_report, score_schemas
from .inference import ENV_URL, InferenceClient
from .model import ValidationError, ingest_document
from .schema import build_schema, decode_schema, encode_schema, LinkingSchema
from dataclasses import replace as _replace


def _load_bundle(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _options(args) -> PipelineOptions:
    if getattr(args, "config", None):
        return PipelineOptions.from_file(args.config)
    return PipelineOptions()


def _client(args) -> Optional[InferenceClient]:
    if not getattr(args, "remote", False):
        return None
    if not os.environ.get(ENV_URL):
        raise SystemExit(f"--remote requires the {ENV_URL} environment variable")
    return InferenceClient()


def cmd_ingest(args) -> int:
    try:
        doc = ingest_document(_load_bundle(args.bundle))
    except ValidationError as exc:
        print(f"invalid bundle: {exc}", file=sys.stderr)
        return 1
    print(f"doc_id:      {doc.doc_id}")
    print(f"pages:       {len(doc.pages)}")
    print(f"paragraphs:  {len(doc.paragraphs)}")
    print(f"tables:      {len(doc.tables)}")
    for table in doc.tables:
        print(
            f"  {table.id}: table {table.number}, "
            f"{table.n_rows}x{table.n_cols} ({len(table.cells)} cells), "
            f"header rows {table.header_rows}"
        )
    return 0


def cmd_link(args) -> int:
    try:
        doc = ingest_document(_load_bundle(args.bundle))
    except ValidationError as exc:
        print(f"invalid bundle: {exc}", file=sys.stderr)
        return 1
    schema = build_schema(doc, options=_options(args), client=_client(args))
    if args.gold:
        schema = _replace(schema, gold=True)
    data = encode_schema(schema)
    if args.output == "-":
        sys.stdout.buffer.write(data + b"\n")
    else:
        with open(args.output, "wb") as fh:
            fh.write(data)
        n_pairs = len(schema.pairs)
        n_sentences = sum(len(p.sentences) for p in schema.pairs)
        n_mentions = sum(len(s.mentions) for p in schema.pairs for s in p.sentences)
        print(
            f"wrote {args.output}: {n_pairs} pairs, {n_sentences} sentences, "
            f"{n_mentions} aligned mentions"
        )
    return 0


def _load_schema(path: str) -> LinkingSchema:
    with open(path, "rb") as fh:
        return decode_schema(fh.read())


def cmd_eval(args) -> int:
    pred = _load_schema(args.pred)
    gold = _load_schema(args.gold)
    doc = ingest_document(_load_bundle(args.bundle))
    report = score_schemas(pred, gold, doc)
    if args.json:
        print(dump_report(report))
    else:
        print(format_report(report))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SchemaStore, create_app

    store = SchemaStore(args.data_dir, options=_options(args), client=_client(args))
    uvicorn.run(create_app(store), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tablink",
        description="Text-to-table linking engine: build, serve and score "
        "document linking schemas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a document bundle and print a summary")
    p.add_argument("bundle", help="path to a canonical bundle JSON file")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("link", help="build the linking schema for a bundle")
    p.add_argument("bundle", help="path to a canonical bundle JSON file")
    p.add_argument(
        "-o", "--output", default="-", help="schema output path (default: stdout)"
    )
    p.add_argument("--config", help="pipeline config JSON (tolerances, lexicons)")
    p.add_argument(
        "--remote",
        action="store_true",
        help=f"augment detection/resolution via the backend at ${ENV_URL}",
    )
    p.add_argument(
        "--gold",
        action="store_true",
        help="mark the emitted schema as a gold annotation file",
    )
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("eval", help="score a predicted schema against gold")
    p.add_argument("--pred", required=True, help="predicted schema file")
    p.add_argument("--gold", required=True, help="gold schema file")
    p.add_argument(
        "--bundle",
        required=True,
        help="source bundle (needed to expand targets to cell sets)",
    )
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the schema HTTP service")
    p.add_argument("--host", default="127.0.0.1", help="bind address (default %(default)s)")
    p.add_argument("--port", type=int, default=8000, help="port (default %(default)s)")
    p.add_argument(
        "--data-dir",
        default="./tablink-data",
        help="directory for cached schemas (default %(default)s)",
    )
    p.add_argument("--config", help="pipeline config JSON (tolerances, lexicons)")
    p.add_argument(
        "--remote",
        action="store_true",
        help=f"augment detection/resolution via the backend at ${ENV_URL}",
    )
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
