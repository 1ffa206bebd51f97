"""Result files: newline-delimited record catalogs and CSV exports."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable

from cayley.errors import MalformedRecord
from search.extremal import ExtremalRecord
from search.family_search import FamilySearchResult

logger = logging.getLogger(__name__)

RECORD_FIELDS = ("d", "n", "generators", "self_inverse_included")
FAMILY_COLUMNS = ("l", "variant", "n", "U", "V", "W", "coefficient_num", "coefficient_den")


def record_from_dict(obj: Any) -> ExtremalRecord:
    if not isinstance(obj, dict):
        raise MalformedRecord(f"expected an object, got {type(obj).__name__}")
    if set(obj) != set(RECORD_FIELDS):
        raise MalformedRecord(f"record fields must be exactly {list(RECORD_FIELDS)}, got {sorted(obj)}")
    d, n, gens, flag = (obj[k] for k in RECORD_FIELDS)
    if not isinstance(d, int) or not isinstance(n, int) or isinstance(d, bool) or isinstance(n, bool):
        raise MalformedRecord(f"d and n must be integers, got d={d!r}, n={n!r}")
    if not isinstance(gens, list) or not all(isinstance(g, int) and not isinstance(g, bool) for g in gens):
        raise MalformedRecord(f"generators must be a list of integers, got {gens!r}")
    if not isinstance(flag, bool):
        raise MalformedRecord(f"self_inverse_included must be a boolean, got {flag!r}")
    return ExtremalRecord(d, n, tuple(gens), flag)


def record_to_line(rec: ExtremalRecord) -> str:
    return json.dumps(rec.to_dict())


def parse_catalog(text: str, source: str = "<string>") -> list[ExtremalRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedRecord(f"{source}:{lineno}: not JSON ({e.msg})") from e
        try:
            records.append(record_from_dict(obj))
        except MalformedRecord as e:
            raise MalformedRecord(f"{source}:{lineno}: {e}") from e
    return records


def read_catalog(path: str | Path) -> list[ExtremalRecord]:
    path = Path(path)
    records = parse_catalog(path.read_text(encoding="utf-8"), str(path))
    logger.debug("read %d record(s) from %s", len(records), path)
    return records


def write_catalog(path: str | Path, records: Iterable[ExtremalRecord]) -> None:
    write_lines(path, (rec.to_dict() for rec in records))


def write_lines(path: str | Path, rows: Iterable[dict]) -> None:
    """One JSON object per line."""
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")


def read_lines(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def family_rows(result: FamilySearchResult) -> list[dict]:
    """One row per witness, table layout: n/2 shown in V, 0 in W."""
    rows = []
    coeff = result.coefficient
    for w in result.witnesses:
        rows.append({
            "l": result.l,
            "variant": result.variant.label,
            "n": result.n,
            **w.table_row(),
            "coefficient_num": coeff.numerator,
            "coefficient_den": coeff.denominator,
        })
    return rows


def _csv_cell(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return " ".join(str(v) for v in value)
    return value


def to_csv(rows: Iterable[dict], columns: Iterable[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()
