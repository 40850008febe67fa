"""Reading and validating the simulator's summary CSV schema.

A summary file has optional '#' comment lines, one header row, and one
data row per estimate per grid point. Rendering never recomputes
statistics, so everything a figure shows must already be a column here.
"""

from __future__ import annotations

import csv
from pathlib import Path

SUMMARY_COLUMNS = ("scenario_id", "grid_index", "parameter", "param_value",
                   "estimator_id", "order", "value", "std_error", "samples",
                   "seed")

_NUMERIC = {"grid_index": int, "param_value": float, "order": int,
            "value": float, "std_error": float, "samples": int, "seed": int}


class SchemaError(ValueError):
    """Input CSV does not conform to the summary schema."""


def read_summary(path: str | Path) -> list[dict]:
    """Parsed data rows; SchemaError on missing columns or empty input."""
    path = Path(path)
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#") and ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty input, nothing to plot")
    reader = csv.DictReader(lines)
    missing = [c for c in SUMMARY_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
    rows = []
    for raw in reader:
        row = dict(raw)
        for col, cast in _NUMERIC.items():
            try:
                row[col] = cast(float(raw[col])) if raw[col] != "" else None
            except ValueError as exc:
                raise SchemaError(
                    f"{path}: bad {col} value {raw[col]!r}") from exc
        rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def require_estimators(rows: list[dict], needed: set[str],
                       path: str | Path) -> None:
    """SchemaError naming every estimator the figure needs but lacks."""
    present = {r["estimator_id"] for r in rows}
    missing = sorted(e for e in needed
                     if not any(p.startswith(e) for p in present))
    if missing:
        raise SchemaError(f"{path}: missing columns: "
                          + ", ".join(f"estimator_id={m}" for m in missing))
