"""Field files (JSON) and tabular reports (CSV plus JSON sidecar).

Field schema, version 1::

    {"format_version": 1,
     "grid": {"n": 4096, "half_length": 128.0},
     "samples": [...]}

Samples are written with ``repr`` so the round trip is bit-identical.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .errors import IoFailure, NonFiniteSample, SchemaMismatch, VersionUnsupported
from .spectral import Grid, RealField

__all__ = [
    "FORMAT_VERSION",
    "GAMMA_STUDY_COLUMNS",
    "STABILITY_COLUMNS",
    "write_field",
    "read_field",
    "write_csv",
    "write_sidecar",
    "write_report",
    "format_number",
    "report_extras",
]

FORMAT_VERSION = 1

GAMMA_STUDY_COLUMNS = ("gamma", "m", "dist_h12", "residual", "iterations")
STABILITY_COLUMNS = ("t", "orbital_distance", "shift", "E_drift", "V_drift")


def format_number(v) -> str:
    """Shortest round-trip text for a number (``repr`` for floats)."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_field(u: RealField, path) -> None:
    if not np.all(np.isfinite(u.values)):
        raise NonFiniteSample("refusing to write a field with non-finite samples")
    doc = {
        "format_version": FORMAT_VERSION,
        "grid": {"n": u.grid.n, "half_length": float(u.grid.half_length)},
        "samples": [float(v) for v in u.values],
    }
    # json uses repr for floats, which round-trips exactly
    _atomic_write_text(path, json.dumps(doc) + "\n")


def read_field(path) -> RealField:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or not {"format_version", "grid", "samples"} <= doc.keys():
        raise SchemaMismatch(f"{path}: expected keys format_version, grid, samples")
    ver = doc["format_version"]
    if ver != FORMAT_VERSION:
        raise VersionUnsupported(
            f"{path}: format_version {ver!r} is not supported (this build reads version {FORMAT_VERSION})"
        )
    grid = doc["grid"]
    if not isinstance(grid, dict) or not {"n", "half_length"} <= grid.keys():
        raise SchemaMismatch(f"{path}: grid needs n and half_length")
    n, half = grid["n"], grid["half_length"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise SchemaMismatch(f"{path}: grid.n must be an integer, got {n!r}")
    try:
        g = Grid(n, float(half))
    except (ValueError, TypeError) as exc:
        raise SchemaMismatch(f"{path}: {exc}") from exc
    samples = doc["samples"]
    if not isinstance(samples, list) or len(samples) != n:
        raise SchemaMismatch(f"{path}: expected {n} samples")
    if not all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in samples):
        raise SchemaMismatch(f"{path}: samples must be numbers")
    values = np.array(samples, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteSample(f"{path}: non-finite sample")
    return RealField(g, values)


def write_csv(path, columns, rows) -> None:
    """Write ``rows`` (sequences in ``columns`` order) with fixed formatting."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        if len(r) != len(columns):
            raise ValueError(f"row has {len(r)} entries, expected {len(columns)}")
        w.writerow([format_number(v) for v in r])
    _atomic_write_text(path, buf.getvalue())


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_sidecar(csv_path, meta: dict) -> Path:
    """JSON next to ``csv_path`` (same stem, ``.json``)."""
    side = Path(csv_path).with_suffix(".json")
    _atomic_write_text(side, json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n")
    return side


def write_report(data, path, meta: dict | None = None) -> Path:
    """Write gamma-study rows or a stability report as CSV plus sidecar.

    ``data`` is a sequence of :class:`~rbolab.stability.GammaStudyRow` (an
    empty sequence gives the gamma-study header only) or a
    :class:`~rbolab.stability.StabilityReport`.
    """
    from .stability import StabilityReport

    path = Path(path)
    if isinstance(data, StabilityReport):
        rows = zip(data.times, data.orbital_distances, data.shifts, data.E_drift, data.V_drift)
        write_csv(path, STABILITY_COLUMNS, list(rows))
    else:
        rows = [(r.gamma, r.m_value, r.dist_h12_to_q, r.residual_rel, r.iterations) for r in data]
        write_csv(path, GAMMA_STUDY_COLUMNS, rows)
    write_sidecar(path, {**(meta or {}), **report_extras(data)})
    return path


def report_extras(data) -> dict:
    """Summary keys that accompany a report in its sidecar."""
    from .stability import StabilityReport

    if isinstance(data, StabilityReport):
        return {"verdict": data.verdict, "threshold": data.threshold, "seed": data.seed,
                "perturbation_amp": data.perturbation_amp,
                "sup_orbital_distance": data.sup_distance}
    return {}
