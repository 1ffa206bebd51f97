"""Run manifests written next to every result file."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any

FALLBACK_VERSION = "0.1.0"
MANIFEST_SUFFIX = ".manifest.json"


def tool_version() -> str:
    try:
        return metadata.version("ddx2")
    except metadata.PackageNotFoundError:
        return FALLBACK_VERSION


def canonical_json(result: Any) -> str:
    return json.dumps(result, sort_keys=True, separators=(",", ":"))


def result_digest(result: Any) -> str:
    """sha256 of the canonical serialization of a result."""
    return hashlib.sha256(canonical_json(result).encode("utf-8")).hexdigest()


def now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    tool_version: str = field(default_factory=tool_version)
    started: str = field(default_factory=now)
    finished: str = ""
    result_digest: str = ""

    def finish(self, result: Any) -> RunManifest:
        self.finished = now()
        self.result_digest = result_digest(result)
        return self


def manifest_path(output: str | Path) -> Path:
    return Path(str(output) + MANIFEST_SUFFIX)


def write_manifest(output: str | Path, manifest: RunManifest) -> Path:
    path = manifest_path(output)
    path.write_text(json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_manifest(output: str | Path) -> RunManifest:
    data = json.loads(manifest_path(output).read_text(encoding="utf-8"))
    return RunManifest(**data)
