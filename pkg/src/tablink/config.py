"""Pipeline options and their cache fingerprint."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class PipelineOptions:
    """Tunable knobs of the linking pipeline.

    Lexicon paths default to the packaged assets; the approximate-match
    tolerance applies only to scale-suffixed values. The inference endpoint
    and token are intentionally not here (environment variables), so they
    never leak into cache keys or schema files.
    """

    abbreviations_path: Optional[str] = None
    cues_path: Optional[str] = None
    approx_rel_tol: float = 0.02

    @staticmethod
    def from_file(path: str) -> "PipelineOptions":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = {"abbreviations_path", "cues_path", "approx_rel_tol"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return PipelineOptions(**raw)

    def fingerprint(self) -> str:
        """Stable hash over everything that can change pipeline output."""
        payload = {"approx_rel_tol": self.approx_rel_tol}
        for name, path in (
            ("abbreviations", self.abbreviations_path),
            ("cues", self.cues_path),
        ):
            if path is None:
                payload[name] = "default"
            else:
                with open(path, "rb") as fh:
                    payload[name] = hashlib.sha256(fh.read()).hexdigest()
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()
