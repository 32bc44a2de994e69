"""CSV and JSON readers/writers. Floats are written with 17 significant
digits so every value reads back bit for bit."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import OutOfRange
from .log_grid import ConvergenceTrace, GridDistribution


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_json(obj) -> str:
    # json uses repr for floats, which round-trips exactly
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        import sys
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _table(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def grid_csv(g: GridDistribution) -> str:
    return _table(["x", "f"], zip(g.x.tolist(), g.values.tolist()))


def sweep_csv(table: np.ndarray) -> str:
    return _table(["value", "alpha"], table.tolist())


def samples_csv(samples) -> str:
    return _table(["wealth"], ([float(v)] for v in np.asarray(samples)))


def trace_csv(trace: ConvergenceTrace) -> str:
    ratios = np.concatenate([[np.nan], trace.ratios])
    rows = ((k, float(d), "" if not np.isfinite(r) else float(r))
            for k, (d, r) in enumerate(zip(trace.distances, ratios)))
    return _table(["step", "distance", "ratio"], rows)


def _read(path_or_text, header: list[str]) -> list[list[str]]:
    text = path_or_text
    if not (isinstance(path_or_text, str) and "\n" in path_or_text):
        text = Path(path_or_text).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != header:
        raise OutOfRange(f"expected CSV header {','.join(header)}")
    return rows[1:]


def read_grid_csv(source, lam: float, m: int, signed: bool = False) -> GridDistribution:
    rows = _read(source, ["x", "f"])
    x = np.array([float(r[0]) for r in rows])
    f = np.array([float(r[1]) for r in rows])
    h = lam / m
    base = int(round(math.log(x[0]) / h))
    return GridDistribution(base, m, lam, f, signed=signed)


def read_grid_x(source) -> np.ndarray:
    return np.array([float(r[0]) for r in _read(source, ["x", "f"])])


def read_sweep_csv(source) -> np.ndarray:
    return np.array([[float(v) for v in r] for r in _read(source, ["value", "alpha"])])


def read_samples_csv(source) -> np.ndarray:
    return np.array([float(r[0]) for r in _read(source, ["wealth"])])


def read_trace_csv(source) -> ConvergenceTrace:
    rows = _read(source, ["step", "distance", "ratio"])
    return ConvergenceTrace(np.array([float(r[1]) for r in rows]))


def read_json(source):
    if isinstance(source, str) and source.lstrip().startswith("{"):
        return json.loads(source)
    return json.loads(Path(source).read_text())
