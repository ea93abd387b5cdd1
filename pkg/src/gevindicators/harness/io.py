"""Record tables, P3 pixmaps and run manifests."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .experiments import GridScan, IndicatorRecord

__all__ = [
    "record_columns",
    "record_to_row",
    "write_records",
    "read_records",
    "write_table",
    "render_heatmap",
    "ramp_color",
    "write_manifest",
    "MISSING_COLOR",
]

_PARAMS = ("mu", "sigma", "xi")

#: Cells without a fit; not on the blue-red ramp.
MISSING_COLOR = (128, 128, 128)


def record_columns(observables) -> list[str]:
    cols = ["index", "x0", "y0"]
    for o in observables:
        cols += [f"{p}_{o}" for p in _PARAMS]
        cols += [f"{p}_{o}_{end}" for p in _PARAMS for end in ("lo", "hi")]
        cols += [f"theory_{p}_{o}" for p in _PARAMS]
        cols += [f"dev_{p}_{o}" for p in _PARAMS]
        cols += [f"in_ci_{p}_{o}" for p in _PARAMS]
        cols += [f"returns_{o}", f"boot_failed_{o}", f"status_{o}"]
    return cols + ["divergence", "reversibility", "classification"]


def _column_type(col: str):
    if col == "index" or col.startswith(("returns_", "in_ci_")):
        return int
    if col.startswith("status_") or col == "classification":
        return str
    return float


def record_to_row(rec: IndicatorRecord) -> dict:
    row = {"index": rec.index, "x0": rec.x0, "y0": rec.y0}
    for name, res in rec.observables.items():
        fit, dev = res.fit, res.deviation
        for p in _PARAMS:
            row[f"{p}_{name}"] = getattr(fit.params, p) if fit else None
            lo, hi = getattr(fit.ci, p) if fit else (None, None)
            row[f"{p}_{name}_lo"], row[f"{p}_{name}_hi"] = lo, hi
            row[f"theory_{p}_{name}"] = getattr(res.target, p)
            row[f"dev_{p}_{name}"] = getattr(dev, p) if dev else None
            flag = dev.inside_ci.get(p) if dev else None
            row[f"in_ci_{p}_{name}"] = None if flag is None else int(flag)
        row[f"returns_{name}"] = res.exact_return_count
        row[f"boot_failed_{name}"] = fit.failed_fraction if fit else None
        row[f"status_{name}"] = res.status
    row.update(divergence=rec.divergence, reversibility=rec.reversibility,
               classification=rec.classification)
    return row


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(float(value))
    return str(value)


def write_table(rows: list[dict], path, columns: list[str] | None = None) -> Path:
    path = Path(path)
    if columns is None:
        columns = list(rows[0]) if rows else []
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format(row.get(c)) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write table {path}: {exc}") from exc
    return path


def write_records(records: list[IndicatorRecord], path, observables=None) -> Path:
    """Write one CSV row per record; empty cells mark missing values."""
    if observables is None:
        observables = list(records[0].observables) if records else ["g1", "g2", "g3"]
    return write_table([record_to_row(r) for r in records], path, record_columns(observables))


def read_records(path) -> list[dict]:
    """Parse a table written by :func:`write_records` back into typed rows."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            return [{k: (None if v == "" else _column_type(k)(v)) for k, v in row.items()}
                    for row in reader]
    except OSError as exc:
        raise OSError(f"cannot read table {path}: {exc}") from exc


def ramp_color(t: float) -> tuple[int, int, int]:
    """Linear blue (t=0) to red (t=1) ramp."""
    t = min(max(t, 0.0), 1.0)
    return (int(round(255 * t)), 0, int(round(255 * (1 - t))))


def render_heatmap(grid, field: str, path) -> Path:
    """Write a plain-text P3 pixmap of ``field``, one pixel per lattice cell.

    ``grid`` is a :class:`GridScan` or a 2-D array whose row ``j``
    corresponds to increasing ``y``; the image shows ``y`` growing upwards.
    Values are mapped linearly between their 2nd and 98th percentiles onto
    :func:`ramp_color`; undefined cells get :data:`MISSING_COLOR`.
    """
    values = grid.field(field) if isinstance(grid, GridScan) else np.asarray(grid, dtype=float)
    finite = values[np.isfinite(values)]
    if finite.size:
        lo, hi = (float(v) for v in np.percentile(finite, [2, 98]))
    else:
        lo = hi = 0.0
    height, width = values.shape
    lines = ["P3", f"# {field} linear ramp {lo!r} .. {hi!r}", f"{width} {height}", "255"]
    for j in range(height - 1, -1, -1):
        pixels = []
        for v in values[j]:
            if not math.isfinite(v):
                rgb = MISSING_COLOR
            else:
                rgb = ramp_color(0.5 if hi == lo else (v - lo) / (hi - lo))
            pixels.append("%d %d %d" % rgb)
        lines.append(" ".join(pixels))
    path = Path(path)
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write pixmap {path}: {exc}") from exc
    return path


def write_manifest(path, payload: dict) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write manifest {path}: {exc}") from exc
    return path
