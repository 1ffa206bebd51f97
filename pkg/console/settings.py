"""Configuration: YAML defaults, environment overrides, command-line flags."""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any

import yaml

from search.pool import default_jobs

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG_PATH = BASE_DIR / "config" / "ddx2.yaml"

DEFAULTS: dict[str, Any] = {
    "jobs": None,
    "format": "table",
    "uncovered_limit": 20,
    "completion_budget": 4,
    "catalog": "config/table5.jsonl",
}


def load_config(path: str | Path | None = None) -> dict[str, Any]:
    """Built-in defaults overlaid with the YAML file (if it exists)."""
    config = dict(DEFAULTS)
    path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not path.exists():
        logger.warning("config file %s not found, using built-in defaults", path)
        return config
    with open(path) as f:
        loaded = yaml.safe_load(f) or {}
    if not isinstance(loaded, dict):
        raise ValueError(f"config file {path} must hold a mapping, got {type(loaded).__name__}")
    unknown = set(loaded) - set(DEFAULTS)
    if unknown:
        logger.warning("ignoring unknown config keys: %s", sorted(unknown))
    config.update({k: v for k, v in loaded.items() if k in DEFAULTS})
    return config


def resolve_path(value: str | Path) -> Path:
    """Relative paths in the config are relative to the repository root."""
    path = Path(value)
    return path if path.is_absolute() else BASE_DIR / path


def resolve_jobs(flag: int | None, config: dict[str, Any]) -> int:
    """--jobs, then DDX2_JOBS, then the config value, then one per CPU."""
    if flag is not None:
        jobs = flag
    elif os.getenv("DDX2_JOBS"):
        jobs = int(os.getenv("DDX2_JOBS", "1"))
    elif config.get("jobs") is not None:
        jobs = int(config["jobs"])
    else:
        jobs = default_jobs()
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    return jobs
