"""Parameter grids, derivatives, cusp detection and scaling fits."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ConfigError, InsufficientPoints, LMGError

DEFAULT_JUMP_THRESHOLD = 10.0
DEFAULT_STEPS = 400


@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    steps: int = DEFAULT_STEPS

    @classmethod
    def single(cls, name, value):
        return cls(name, float(value), float(value), 1)

    def values(self) -> np.ndarray:
        if int(self.steps) != self.steps or self.steps < 1:
            raise ConfigError(f"axis {self.name}: steps must be a positive integer")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ConfigError(f"axis {self.name}: bounds must be finite")
        if self.steps == 1:
            if self.lo != self.hi:
                raise ConfigError(f"axis {self.name}: one step needs lo == hi")
            return np.array([self.lo])
        if not self.lo < self.hi:
            raise ConfigError(f"axis {self.name}: need min < max, got {self.lo} >= {self.hi}")
        return np.linspace(self.lo, self.hi, int(self.steps))


@dataclass
class SweepTable:
    """Row-major grid of evaluations. ``rows[i]["error"]`` is None or the
    failure message for that point; failed numeric entries are NaN."""

    axes: dict
    rows: list
    columns: list = field(default_factory=list)

    @property
    def shape(self):
        return tuple(len(v) for v in self.axes.values())

    def column(self, name) -> np.ndarray:
        return np.array([r.get(name, math.nan) for r in self.rows], dtype=float).reshape(self.shape)

    def failures(self):
        return [(i, r["error"]) for i, r in enumerate(self.rows) if r["error"]]


def sweep(evaluator, axis_specs, fixed=None, threads=1) -> SweepTable:
    """Evaluate ``evaluator(**fixed, **point)`` on the product grid.

    The evaluator returns a dict of column values. Package errors at a point
    are recorded in the row, not raised. Rows come back in grid order
    regardless of ``threads``.
    """
    fixed = dict(fixed or {})
    if not axis_specs:
        raise ConfigError("at least one axis is required")
    names = [a.name for a in axis_specs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate axis names")
    axes = {a.name: a.values() for a in axis_specs}
    points = [dict(zip(names, combo)) for combo in itertools.product(*axes.values())]

    def run(point):
        row = {**fixed, **{k: float(v) for k, v in point.items()}}
        try:
            row.update(evaluator(**row))
            row["error"] = None
        except LMGError as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        return row

    if threads is None or threads == 0:
        threads = None  # executor default
    if threads == 1:
        rows = [run(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, points))
    columns = []
    for row in rows:
        for key in row:
            if key not in columns and key != "error":
                columns.append(key)
    for row in rows:
        for key in columns:
            row.setdefault(key, math.nan)
    return SweepTable(axes, rows, columns)


def _line(table, column, axis):
    if axis not in table.axes:
        raise ConfigError(f"unknown axis {axis!r}")
    values = table.column(column)
    k = list(table.axes).index(axis)
    return table.axes[axis], np.moveaxis(values, k, -1)


def central_derivative(table: SweepTable, column, axis) -> np.ndarray:
    """d column / d axis on the table's grid, second-order accurate
    (central inside, one-sided three-point at the edges)."""
    x, f = _line(table, column, axis)
    if len(x) < 3:
        raise InsufficientPoints(f"axis {axis!r} has {len(x)} points, need >= 3")
    k = list(table.axes).index(axis)
    return np.moveaxis(np.gradient(f, x, axis=-1, edge_order=2), -1, k)


def jump_ratios(x, f, window=6) -> np.ndarray:
    """Slope jump |s_right - s_left| at each interior point, divided by the
    median jump of the surrounding points (immediate neighbours excluded).
    Edge entries are 0."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if len(x) < 3:
        raise InsufficientPoints("need >= 3 points")
    slopes = np.diff(f) / np.diff(x)
    jumps = np.abs(np.diff(slopes))
    spacing = float(np.min(np.diff(x)))
    finite = f[np.isfinite(f)]
    scale_f = float(np.max(np.abs(finite))) if finite.size else 1.0
    # floor: what rounding noise in f alone can produce
    floor = 1e-9 * max(scale_f, 1e-300) / spacing
    ratios = np.zeros(len(x))
    for i in range(len(jumps)):
        lo, hi = max(0, i - window), min(len(jumps), i + window + 1)
        ref = [jumps[j] for j in range(lo, hi) if abs(j - i) > 1 and np.isfinite(jumps[j])]
        scale = max(float(np.median(ref)) if ref else 0.0, floor)
        ratios[i + 1] = jumps[i] / scale if np.isfinite(jumps[i]) else 0.0
    return ratios


def find_cusps(x, f, jump_threshold=DEFAULT_JUMP_THRESHOLD):
    """Locations where the one-sided slopes disagree by more than
    ``jump_threshold`` times the local jump scale. Adjacent flagged points
    are merged, keeping the strongest."""
    x = np.asarray(x, dtype=float)
    ratios = jump_ratios(x, f)
    flagged = np.nonzero(ratios > jump_threshold)[0]
    out = []
    for _, group in itertools.groupby(enumerate(flagged), key=lambda p: p[1] - p[0]):
        idx = [g[1] for g in group]
        out.append(float(x[max(idx, key=lambda i: ratios[i])]))
    return out


def cusp_detect(table: SweepTable, column, axis,
                jump_threshold=DEFAULT_JUMP_THRESHOLD):
    """Cusp locations along ``axis`` for a table whose other axes are
    singletons."""
    x, f = _line(table, column, axis)
    if f.size != len(x):
        raise ConfigError("cusp detection needs a one-dimensional sweep")
    return find_cusps(x, f.reshape(-1), jump_threshold)


@dataclass(frozen=True)
class ScalingFit:
    kind: str  # "linear" or "loglog"
    slope: float
    intercept: float
    r_sq: float
    domain: tuple


def _fit(kind, x, y, domain):
    result = stats.linregress(x, y)
    r_sq = min(max(float(result.rvalue) ** 2, 0.0), 1.0)
    if not math.isfinite(r_sq):
        r_sq = 1.0  # exactly constant data
    return ScalingFit(kind, float(result.slope), float(result.intercept), r_sq, domain)


def scaling_fit(n_values, phi_values):
    """Least-squares lines phi vs N and log|phi| vs log N."""
    n = np.asarray(n_values, dtype=float)
    phi = np.asarray(phi_values, dtype=float)
    if n.size < 3 or n.size != phi.size:
        raise InsufficientPoints("scaling fit needs >= 3 (N, phi) pairs")
    if np.any(np.diff(n) <= 0):
        raise ConfigError("n_values must be strictly increasing")
    domain = (float(n[0]), float(n[-1]))
    linear = _fit("linear", n, phi, domain)
    if np.any(n <= 0) or np.any(phi == 0):
        loglog = ScalingFit("loglog", math.nan, math.nan, math.nan, domain)
    else:
        loglog = _fit("loglog", np.log(n), np.log(np.abs(phi)), domain)
    return linear, loglog
