"""Client for the remote mention-inference backend.

The wire contract is transport-agnostic JSON over one POST endpoint:

  detect:  {"sentence", "table_context", "task": "detect"}
           -> {"mentions": [{"text", "start", "end", "type"}]}
  resolve: {"sentence", "mention": {"text", "start", "end", "type"},
            "table_context", "task": "resolve"}
           -> {"target": {"granularity", "cells"|"row"|"col"|"rect"}}

Endpoint and token come from configuration or the TABLINK_INFERENCE_URL /
TABLINK_INFERENCE_TOKEN environment variables. Detection responses are
always passed through validate_mention_spans, so a backend cannot introduce
spans that do not exist in the sentence.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Optional

import httpx

from .mentions import Mention, validate_mention_spans
from .model import Table
from .segmentation import Sentence

log = logging.getLogger(__name__)

ENV_URL = "TABLINK_INFERENCE_URL"
ENV_TOKEN = "TABLINK_INFERENCE_TOKEN"


class InferenceError(Exception):
    """Base class for remote-backend failures."""


class BackendUnavailableError(InferenceError):
    """Transport kept failing after the configured number of retries."""


class ProtocolError(InferenceError):
    """The backend answered with something outside the wire contract."""

    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


def serialize_table_context(table: Table) -> str:
    """Compact JSON rendering of a table for the backend prompt context."""
    return json.dumps(
        {
            "id": table.id,
            "number": table.number,
            "caption": table.caption,
            "n_rows": table.n_rows,
            "n_cols": table.n_cols,
            "header_rows": table.header_rows,
            "cells": [
                {
                    "id": c.id,
                    "row": c.row,
                    "col": c.col,
                    "row_span": c.row_span,
                    "col_span": c.col_span,
                    "text": c.text,
                }
                for c in table.cells
            ],
        },
        ensure_ascii=False,
        separators=(",", ":"),
    )


class InferenceClient:
    """Small synchronous client; shareable across workers."""

    def __init__(
        self,
        endpoint: Optional[str] = None,
        token: Optional[str] = None,
        max_retries: int = 2,
        timeout: float = 30.0,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        endpoint = endpoint or os.environ.get(ENV_URL)
        if not endpoint:
            raise ValueError(f"no inference endpoint configured (set {ENV_URL})")
        self.endpoint = endpoint
        self.token = token if token is not None else os.environ.get(ENV_TOKEN)
        self.max_retries = max_retries
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        self._http = httpx.Client(timeout=timeout, headers=headers, transport=transport)

    def close(self):
        self._http.close()

    def _post(self, body: dict) -> dict:
        last_exc: Optional[Exception] = None
        for _ in range(self.max_retries + 1):
            try:
                response = self._http.post(self.endpoint, json=body)
            except httpx.TransportError as exc:
                last_exc = exc
                continue
            if response.status_code >= 500:
                last_exc = ProtocolError(
                    f"server error {response.status_code}", payload=response.text
                )
                continue
            if response.status_code >= 400:
                raise ProtocolError(
                    f"backend rejected request: {response.status_code}",
                    payload=response.text,
                )
            try:
                payload = response.json()
            except ValueError as exc:
                raise ProtocolError(
                    f"response body is not JSON: {exc}", payload=response.text
                ) from exc
            if not isinstance(payload, dict):
                raise ProtocolError("response is not a JSON object", payload=payload)
            return payload
        raise BackendUnavailableError(
            f"backend unreachable after {self.max_retries + 1} attempts: {last_exc}"
        )

    def request_detect(
        self, sentence: Sentence, table: Table, paragraph_text: Optional[str] = None
    ) -> dict:
        body = {
            "sentence": sentence.text,
            "table_context": serialize_table_context(table),
            "task": "detect",
        }
        if paragraph_text is not None:
            body["paragraph"] = paragraph_text
            body["has_paragraph_context"] = True
        return self._post(body)

    def request_resolve(self, sentence: Sentence, mention: Mention, table: Table) -> dict:
        body = {
            "sentence": sentence.text,
            "mention": {
                "text": mention.text,
                "start": mention.span[0],
                "end": mention.span[1],
                "type": mention.mtype.value,
            },
            "table_context": serialize_table_context(table),
            "task": "resolve",
        }
        return self._post(body)

    def bind(self, sentence: Sentence) -> "SentenceBoundClient":
        return SentenceBoundClient(self, sentence)


class SentenceBoundClient:
    """Pairs the client with the sentence under resolution, giving the
    per-mention interface the resolvers expect."""

    def __init__(self, client: InferenceClient, sentence: Sentence):
        self._client = client
        self._sentence = sentence

    def request_resolve(self, mention: Mention, table: Table) -> dict:
        return self._client.request_resolve(self._sentence, mention, table)


def detect_mentions_remote(
    sentence: Sentence,
    table: Table,
    client: InferenceClient,
    paragraph_text: Optional[str] = None,
) -> list[Mention]:
    """Ask the backend for mention candidates and keep only span-validated
    ones. Raises BackendUnavailableError / ProtocolError on failure."""
    payload = client.request_detect(sentence, table, paragraph_text)
    raw = payload.get("mentions")
    if not isinstance(raw, list):
        raise ProtocolError("response lacks a 'mentions' list", payload=payload)
    for item in raw:
        if not isinstance(item, dict):
            raise ProtocolError("mention entries must be objects", payload=payload)
    return validate_mention_spans(sentence, raw)
