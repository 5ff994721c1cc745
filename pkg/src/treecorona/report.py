"""Deterministic CSV/JSON writers.

Rows keep their given order, JSON keys are sorted, and exact values are
already canonical strings by the time they get here, so two runs with the same
inputs produce the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

__all__ = ["to_csv", "to_json", "write_report"]


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    return v


def to_csv(rows: list, columns: list | None = None) -> str:
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _cell(row.get(k)) for k in columns})
    return buf.getvalue()


def to_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(out_dir: str | Path, tables: dict, fmt: str, summary: dict, columns: dict | None = None) -> list:
    """Write ``tables`` (name -> rows) as CSV files, or everything as one ``report.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    columns = columns or {}
    written = []
    if fmt == "json":
        path = out / "report.json"
        path.write_text(to_json({"summary": summary, **tables}))
        written.append(path)
        return written
    for name, rows in tables.items():
        path = out / f"{name}.csv"
        path.write_text(to_csv(rows, columns.get(name)))
        written.append(path)
    path = out / "summary.json"
    path.write_text(to_json(summary))
    written.append(path)
    return written
