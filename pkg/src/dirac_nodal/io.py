"""CSV / JSON serialization. Floats are written with 17 significant digits."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .forward import NodalSet, Spectrum
from .inverse import NodalData, ReconstructionResult


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps_json(obj) -> str:
    # json emits the shortest round-tripping repr, which is bit-faithful
    return json.dumps(_json_ready(obj), indent=2, sort_keys=False) + "\n"


def spectrum_csv(spectrum: Spectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lambda", "residual"])
    for n in spectrum.indices:
        w.writerow([n, fmt(spectrum.entries[n]), fmt(spectrum.residuals[n])])
    return buf.getvalue()


def nodal_csv(data: NodalData) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "j", "x"])
    for n in sorted(data.sets):
        for j, x in enumerate(data.sets[n].points):
            w.writerow([n, j, fmt(x)])
    return buf.getvalue()


def read_nodal_csv(path: str | Path) -> NodalData:
    rows: dict[int, list[tuple[int, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"n", "j", "x"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns n, j, x")
        for line, row in enumerate(reader, start=2):
            try:
                n, j, x = int(row["n"]), int(row["j"]), float(row["x"])
            except (TypeError, ValueError):
                raise ValueError(f"{path}:{line}: malformed row {row}") from None
            rows.setdefault(n, []).append((j, x))
    if not rows:
        raise ValueError(f"{path}: no nodal data")
    sets = {}
    for n, items in rows.items():
        items.sort()
        pts = np.array([x for _, x in items])
        sets[n] = NodalSet(n, float("nan"), pts, "imported")
    return NodalData(sets)


def reconstruction_json(result: ReconstructionResult) -> str:
    return dumps_json(result.to_dict())


def diagnostics_csv(result: ReconstructionResult) -> str:
    if result.psi is None:
        raise ValueError("reconstruction carries no psi diagnostics")
    est = result.psi
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "psi1", "psi2_plus", "psi2_minus", "fit_residual"])
    for row in zip(est.grid, est.psi1, est.psi2_plus, est.psi2_minus, est.fit_residuals):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()
