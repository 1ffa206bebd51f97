"""Rendering results as plain tables, JSON or CSV."""

from __future__ import annotations

import json
from typing import Any, Iterable, Sequence

from console.catalog import to_csv

FORMATS = ("table", "json", "csv")


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value) if value else "-"
    return str(value)


def table(rows: Sequence[dict], columns: Sequence[str]) -> str:
    cells = [[_cell(row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines)


def key_values(pairs: Iterable[tuple[str, Any]]) -> str:
    pairs = list(pairs)
    width = max((len(k) for k, _ in pairs), default=0)
    return "\n".join(f"{k.ljust(width)} : {_cell(v)}" for k, v in pairs)


def render(result: Any, fmt: str, rows: Sequence[dict] | None = None, columns: Sequence[str] | None = None) -> str:
    """JSON dumps ``result``; table and CSV lay out ``rows`` (or the result's items)."""
    if fmt not in FORMATS:
        raise ValueError(f"Unknown format: {fmt}")
    if fmt == "json":
        return json.dumps(result, indent=2, sort_keys=True)
    if rows is None:
        rows = [result] if isinstance(result, dict) else list(result)
    if columns is None:
        columns = list(rows[0]) if rows else []
    if fmt == "csv":
        return to_csv(rows, columns).rstrip("\n")
    return table(rows, columns)
