"""Read-mostly schema service with content-hash caching.

Schemas are persisted as files under a data directory, keyed by the content
hash of the canonical bundle bytes plus the pipeline-options fingerprint.
At most one build runs per key; publication is write-then-rename so readers
never observe a partial schema.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from fastapi import FastAPI
from fastapi.responses import JSONResponse, Response

from .config import PipelineOptions
from .inference import InferenceClient
from .model import (
    ParsedDocument,
    ValidationError,
    bundle_content_hash,
    canonical_bundle_bytes,
    ingest_document,
)
from .schema import build_schema, encode_schema, normalize_box, target_to_boxes
from .resolution import AlignmentTarget, Granularity

log = logging.getLogger(__name__)


class JobState(enum.Enum):
    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


_STATE_ORDER = {
    JobState.PENDING: 0,
    JobState.RUNNING: 1,
    JobState.DONE: 2,
    JobState.FAILED: 2,
}


@dataclass
class JobRecord:
    job_id: str
    doc_id: str
    state: JobState
    schema_id: Optional[str] = None
    error: Optional[str] = None

    def advance(self, state: JobState, schema_id: Optional[str] = None, error: Optional[str] = None):
        if _STATE_ORDER[state] < _STATE_ORDER[self.state]:
            raise RuntimeError(f"illegal transition {self.state} -> {state}")
        self.state = state
        if schema_id is not None:
            self.schema_id = schema_id
        if error is not None:
            self.error = error

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "doc_id": self.doc_id,
            "state": self.state.value,
            "schema_id": self.schema_id,
            "error": self.error,
        }


class SchemaStore:
    """File-backed schema cache plus job registry."""

    def __init__(
        self,
        data_dir: str | Path,
        options: Optional[PipelineOptions] = None,
        client: Optional[InferenceClient] = None,
    ):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.options = options or PipelineOptions()
        self.client = client
        self._fingerprint = self.options.fingerprint()
        self._lock = threading.Lock()
        self._records: dict[str, JobRecord] = {}  # cache key -> record
        self._by_doc: dict[str, str] = {}  # doc_id -> cache key
        self._docs: dict[str, ParsedDocument] = {}
        self._restore()

    # -- paths ----------------------------------------------------------
    def _schema_path(self, key: str) -> Path:
        return self.data_dir / f"{key}.schema.json"

    def _bundle_path(self, key: str) -> Path:
        return self.data_dir / f"{key}.bundle.json"

    def cache_key(self, bundle: Mapping) -> str:
        content = bundle_content_hash(bundle)
        return hashlib.sha256(f"{content}:{self._fingerprint}".encode()).hexdigest()

    def _restore(self):
        for path in self.data_dir.glob("*.schema.json"):
            key = path.name.removesuffix(".schema.json")
            try:
                doc_id = json.loads(path.read_bytes())["doc_id"]
            except (ValueError, KeyError):
                log.warning("ignoring unreadable schema file %s", path)
                continue
            record = JobRecord(
                job_id=f"restored-{key[:12]}", doc_id=doc_id, state=JobState.DONE, schema_id=key
            )
            self._records[key] = record
            self._by_doc[doc_id] = key

    # -- submission ------------------------------------------------------
    def submit(self, bundle: Mapping, wait: bool = False) -> JobRecord:
        """Validate the bundle and return a job record; cache hits are Done
        immediately, otherwise a build is started (inline when wait=True)."""
        doc = ingest_document(bundle)  # raises ValidationError on bad input
        key = self.cache_key(bundle)
        with self._lock:
            record = self._records.get(key)
            if record is not None and record.state is not JobState.FAILED:
                return record
            record = JobRecord(
                job_id=uuid.uuid4().hex, doc_id=doc.doc_id, state=JobState.PENDING
            )
            self._records[key] = record
            self._by_doc[doc.doc_id] = key
            self._docs[doc.doc_id] = doc
        if wait:
            self._build(key, bundle, doc, record)
        else:
            thread = threading.Thread(
                target=self._build, args=(key, bundle, doc, record), daemon=True
            )
            thread.start()
        return record

    def _build(self, key: str, bundle: Mapping, doc: ParsedDocument, record: JobRecord):
        with self._lock:
            if record.state is not JobState.PENDING:
                return
            record.advance(JobState.RUNNING)
        try:
            schema = build_schema(doc, options=self.options, client=self.client)
            data = encode_schema(schema)
            self._publish(self._bundle_path(key), canonical_bundle_bytes(bundle))
            self._publish(self._schema_path(key), data)
        except Exception as exc:  # surfaced through the job record
            log.exception("build failed for %s", doc.doc_id)
            with self._lock:
                record.advance(JobState.FAILED, error=str(exc))
            return
        with self._lock:
            record.advance(JobState.DONE, schema_id=key)

    def _publish(self, path: Path, data: bytes):
        tmp = path.with_suffix(path.suffix + f".tmp-{uuid.uuid4().hex}")
        tmp.write_bytes(data)
        os.replace(tmp, path)

    # -- reads -----------------------------------------------------------
    def record_for(self, doc_id: str) -> Optional[JobRecord]:
        with self._lock:
            key = self._by_doc.get(doc_id)
            return self._records.get(key) if key else None

    def schema_bytes(self, doc_id: str) -> Optional[bytes]:
        record = self.record_for(doc_id)
        if record is None or record.state is not JobState.DONE:
            return None
        return self._schema_path(record.schema_id).read_bytes()

    def document(self, doc_id: str) -> Optional[ParsedDocument]:
        with self._lock:
            doc = self._docs.get(doc_id)
            if doc is not None:
                return doc
            key = self._by_doc.get(doc_id)
        if key is None:
            return None
        bundle_path = self._bundle_path(key)
        if not bundle_path.exists():
            return None
        doc = ingest_document(json.loads(bundle_path.read_bytes()))
        with self._lock:
            self._docs[doc_id] = doc
        return doc


def _table_payload(doc: ParsedDocument, table_id: str) -> Optional[dict]:
    try:
        table = doc.table_by_id(table_id)
    except KeyError:
        return None
    page = doc.pages[table.page]
    full = AlignmentTarget(Granularity.REGION, rect=(0, table.n_rows - 1, 0, table.n_cols - 1))
    table_box = target_to_boxes(full, table, page)[0]
    return {
        "id": table.id,
        "number": table.number,
        "caption": table.caption,
        "page": table.page,
        "n_rows": table.n_rows,
        "n_cols": table.n_cols,
        "header_rows": table.header_rows,
        "box": {
            "page": table_box.page,
            "x": table_box.x,
            "y": table_box.y,
            "w": table_box.w,
            "h": table_box.h,
        },
        "cells": [
            {
                "id": c.id,
                "row": c.row,
                "col": c.col,
                "row_span": c.row_span,
                "col_span": c.col_span,
                "text": c.text,
                "box": _cell_box(c, page),
            }
            for c in table.cells
        ],
    }


def _cell_box(cell, page) -> dict:
    nbox = normalize_box(cell.box, page).quantized()
    return {"page": nbox.page, "x": nbox.x, "y": nbox.y, "w": nbox.w, "h": nbox.h}


def create_app(store: SchemaStore) -> FastAPI:
    app = FastAPI(title="tablink", docs_url=None, redoc_url=None)

    @app.post("/documents")
    async def submit_document(bundle: dict):
        try:
            record = store.submit(bundle)
        except ValidationError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        return JSONResponse(status_code=200, content=record.to_json())

    @app.get("/documents/{doc_id}/status")
    async def job_status(doc_id: str):
        record = store.record_for(doc_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown document"})
        return JSONResponse(status_code=200, content=record.to_json())

    @app.get("/documents/{doc_id}/schema")
    async def fetch_schema(doc_id: str):
        record = store.record_for(doc_id)
        if record is None:
            return JSONResponse(status_code=404, content={"error": "unknown document"})
        if record.state in (JobState.PENDING, JobState.RUNNING):
            return JSONResponse(
                status_code=202,
                content={"state": record.state.value, "job_id": record.job_id},
                headers={"Retry-After": "1"},
            )
        if record.state is JobState.FAILED:
            return JSONResponse(status_code=500, content={"error": record.error})
        data = store.schema_bytes(doc_id)
        content_hash = json.loads(data)["content_hash"]
        return Response(
            content=data,
            media_type="application/json",
            headers={"ETag": f'"{content_hash}"'},
        )

    @app.get("/documents/{doc_id}/tables/{table_id}")
    async def fetch_table(doc_id: str, table_id: str):
        doc = store.document(doc_id)
        if doc is None:
            return JSONResponse(status_code=404, content={"error": "unknown document"})
        payload = _table_payload(doc, table_id)
        if payload is None:
            return JSONResponse(status_code=404, content={"error": "unknown table"})
        return JSONResponse(status_code=200, content=payload)

    return app
