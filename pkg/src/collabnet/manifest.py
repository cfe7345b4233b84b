"""Run manifests: digests and parameters that pin down a pipeline run.

Two runs with the same inputs, parameters, and seed must produce
byte-identical analytical outputs; the manifest's output_digests map makes
that checkable. Only the created_utc timestamp varies between reruns.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

__all__ = ["RunManifest", "canonical_json", "write_json", "sha256_file"]

TOOL_NAME = "collabnet"


def canonical_json(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed spacing, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False,
                      allow_nan=False) + "\n"


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(canonical_json(obj), encoding="utf-8")


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    version: str
    seed: int
    threads: int
    parameters: dict
    input_digests: dict[str, str] = field(default_factory=dict)
    output_digests: dict[str, str] = field(default_factory=dict)
    created_utc: str = field(
        default_factory=lambda: datetime.now(timezone.utc)
        .isoformat(timespec="seconds"))
    tool: str = TOOL_NAME

    def add_outputs(self, out_dir: str | Path, paths: list[Path]) -> None:
        out_dir = Path(out_dir)
        for p in sorted(paths):
            self.output_digests[str(p.relative_to(out_dir))] = sha256_file(p)

    def to_json_dict(self) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "created_utc": self.created_utc,
            "seed": self.seed,
            "threads": self.threads,
            "parameters": self.parameters,
            "input_digests": self.input_digests,
            "output_digests": self.output_digests,
        }

    def write(self, path: str | Path) -> None:
        write_json(self.to_json_dict(), path)
