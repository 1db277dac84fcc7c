import json
from pathlib import Path

import pytest

from tablink.model import ingest_document

FIXTURES = Path(__file__).parent / "fixtures"


def load_bundle(name: str) -> dict:
    with open(FIXTURES / f"{name}.bundle.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture
def model_scale_doc():
    return ingest_document(load_bundle("model_scale"))


@pytest.fixture
def fewshot_qa_doc():
    return ingest_document(load_bundle("fewshot_qa"))


@pytest.fixture
def multitask_doc():
    return ingest_document(load_bundle("multitask"))


def make_bundle(paragraphs=None, tables=None, doc_id="doc", page=(612.0, 792.0)):
    """Small bundle builder for tests; paragraphs is a list of texts or dicts,
    tables a list of (number, html) or dicts."""
    out_paragraphs = []
    for i, p in enumerate(paragraphs or []):
        if isinstance(p, str):
            p = {"text": p}
        out_paragraphs.append(
            {
                "id": p.get("id", f"p{i}"),
                "page": p.get("page", 0),
                "box": p.get("box", [10, 100 + 120 * i, 500, 100]),
                "text": p["text"],
            }
        )
    out_tables = []
    for i, t in enumerate(tables or []):
        if isinstance(t, tuple):
            t = {"number": t[0], "html": t[1]}
        out_tables.append(
            {
                "id": t.get("id", f"t{i}"),
                "number": t["number"],
                "caption": t.get("caption", f"Table {t['number']}."),
                "page": t.get("page", 0),
                "box": t.get("box", [10, 10, 500, 80]),
                "header_rows": t.get("header_rows", 1),
                "html": t["html"],
            }
        )
    return {
        "doc_id": doc_id,
        "pages": [{"index": 0, "width": page[0], "height": page[1]}],
        "paragraphs": out_paragraphs,
        "tables": out_tables,
    }


def grid_html(rows):
    """rows: list of lists of either str or (text, rowspan, colspan)."""
    parts = ["<table>"]
    for row in rows:
        parts.append("<tr>")
        for cell in row:
            if isinstance(cell, tuple):
                text, rs, cs = cell
                parts.append(f'<td rowspan="{rs}" colspan="{cs}">{text}</td>')
            else:
                parts.append(f"<td>{cell}</td>")
        parts.append("</tr>")
    parts.append("</table>")
    return "".join(parts)
