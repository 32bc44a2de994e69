"""Exact discretization of the wealth operator on a logarithmic grid.

Cell ``j`` of a grid sits at ``x = exp(j * h)`` with ``h = lam / m`` and
``lam = log(1 + gamma)``, so multiplying or dividing wealth by ``1 + gamma``
is an integer shift of ``m`` cells and the operator needs no interpolation.
Values are density samples ``f(x_j)``; the mass of a grid is the midpoint
rule in log coordinates, ``h * sum(|f_j| * x_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .closed_form import pareto_exponent
from .dirichlet import ClassMix, common_step
from .exceptions import (AlignmentMismatch, EmptyInterior, OutOfRange,
                         ResourceLimit)
from .params import ModelParams

DEFAULT_M = 8
DEFAULT_CELL_CAP = 1_000_000
_ALIGN_RTOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    m: int = DEFAULT_M
    x_min: float = 1.0
    x_max: float = 1e6


@dataclass(frozen=True, eq=False)
class GridDistribution:
    base_index: int
    m: int
    lam: float
    values: np.ndarray
    signed: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise OutOfRange("grid values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise OutOfRange("grid values must be finite")
        if not self.signed and np.any(values < 0):
            raise OutOfRange("density grid values must be >= 0")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return self.lam / self.m

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def indices(self) -> np.ndarray:
        return self.base_index + np.arange(self.size)

    @property
    def log_x(self) -> np.ndarray:
        return self.indices * self.step

    @property
    def x(self) -> np.ndarray:
        return np.exp(self.log_x)

    def with_values(self, values, base_index: int | None = None,
                    signed: bool | None = None) -> "GridDistribution":
        return replace(
            self,
            values=values,
            base_index=self.base_index if base_index is None else base_index,
            signed=self.signed if signed is None else signed,
        )

    def window(self, start: int, stop: int) -> "GridDistribution":
        """Cells ``start:stop`` (array positions, not absolute indices)."""
        return self.with_values(self.values[start:stop], self.base_index + start)

    def to_absolute(self, lo: int, hi: int) -> np.ndarray:
        """Values on absolute cell indices ``lo..hi-1``, zero outside support."""
        out = np.zeros(hi - lo)
        a = max(lo, self.base_index)
        b = min(hi, self.base_index + self.size)
        if a < b:
            out[a - lo:b - lo] = self.values[a - self.base_index:b - self.base_index]
        return out


@dataclass(frozen=True)
class GridOperator:
    """Per-class ``(shift, win weight, loss weight)`` triples on a grid of step lam/m.

    A win moves density up by ``shift`` cells with weight ``p/(kappa(1+g))``;
    a loss moves it down with weight ``q(1+g)/kappa``.
    """

    lam: float
    m: int
    terms: tuple[tuple[int, float, float], ...]
    kappa: float = 1.0

    @property
    def reach(self) -> int:
        return max(s for s, _, _ in self.terms)

    @classmethod
    def from_params(cls, params: ModelParams, m: int) -> "GridOperator":
        g1 = 1.0 + params.gamma
        win = params.p / (params.kappa * g1)
        loss = (1.0 - params.p) * g1 / params.kappa
        return cls(params.lam, m, ((m, win, loss),), params.kappa)

    @classmethod
    def from_mix(cls, mix: ClassMix, m: int) -> "GridOperator":
        aligned = common_step(mix, m)
        if aligned is None:
            raise AlignmentMismatch(
                "class gammas are incommensurate; no common aligned grid step "
                "(use the Dirichlet root finder or Monte Carlo instead)"
            )
        _, shifts = aligned
        terms = tuple(
            (s, e.p / (mix.kappa * (1.0 + e.gamma)), e.q * (1.0 + e.gamma) / mix.kappa)
            for s, e in zip(shifts, mix.entries)
        )
        return cls(math.log1p(mix.entries[0].gamma), m, terms, mix.kappa)


def as_operator(model, g: GridDistribution) -> GridOperator:
    if isinstance(model, GridOperator):
        op = model
    elif isinstance(model, ClassMix):
        op = GridOperator.from_mix(model, g.m)
    else:
        op = GridOperator.from_params(model, g.m)
    if op.m != g.m or abs(op.lam - g.lam) > _ALIGN_RTOL * g.lam:
        raise AlignmentMismatch(
            f"grid (lam={g.lam!r}, m={g.m}) is not aligned to the model "
            f"(lam={op.lam!r}, m={op.m})"
        )
    return op


def make_grid(params: ModelParams, m: int = DEFAULT_M, x_min: float = 1.0,
              x_max: float = 1e6, *, lam: float | None = None) -> GridDistribution:
    """Zero grid covering ``[x_min, x_max]`` with cells on multiples of lam/m."""
    if int(m) != m or m < 1:
        raise OutOfRange("m must be a positive integer")
    if not (0.0 < x_min < x_max) or not math.isfinite(x_max):
        raise OutOfRange("grid bounds need 0 < x_min < x_max < inf")
    lam = params.lam if lam is None else lam
    h = lam / m
    # snap bounds that sit on a cell up to rounding
    lo = math.floor(math.log(x_min) / h + 1e-9)
    hi = math.ceil(math.log(x_max) / h - 1e-9)
    return GridDistribution(lo, int(m), lam, np.zeros(hi - lo + 1))


def discrete_l1(g: GridDistribution) -> float:
    return float(g.step * np.sum(np.abs(g.values) * g.x))


def discrete_mass(values: np.ndarray, log_x: np.ndarray, h: float) -> float:
    return float(h * np.sum(np.abs(values) * np.exp(log_x)))


def apply_operator(g: GridDistribution, model, *,
                   cell_cap: int = DEFAULT_CELL_CAP) -> GridDistribution:
    """One round of the dissipative wealth operator; support grows by the shift."""
    op = as_operator(model, g)
    r = op.reach
    n = g.size
    if n + 2 * r > cell_cap:
        raise ResourceLimit(f"grid would grow to {n + 2 * r} cells (cap {cell_cap})")
    out = np.zeros(n + 2 * r)
    f = g.values
    for shift, win, loss in op.terms:
        # fixed order: win term, then loss term, class by class
        out[r + shift:r + shift + n] += win * f
        out[r - shift:r - shift + n] += loss * f
    return g.with_values(out, g.base_index - r)


def pareto_fixed_point(params: ModelParams, spec: GridSpec | GridDistribution,
                       modulation=None, scale: float = 1.0,
                       branch: str = "sound") -> GridDistribution:
    """``f_j = C * x_j**rho * M[j mod m]`` with ``rho`` the decaying root
    (``branch="sound"``) or the growing one (``branch="growing"``).

    Exact fixed point of :func:`apply_operator` on cells at least ``m`` away
    from either boundary.
    """
    grid = spec if isinstance(spec, GridDistribution) else make_grid(
        params, spec.m, spec.x_min, spec.x_max)
    m = grid.m
    if modulation is None:
        modulation = np.ones(m)
    modulation = np.asarray(modulation, dtype=float)
    if modulation.shape != (m,):
        raise OutOfRange(f"modulation needs exactly m={m} entries")
    if not np.all(modulation > 0) or not np.all(np.isfinite(modulation)):
        raise OutOfRange("modulation entries must be positive and finite")
    if not scale > 0:
        raise OutOfRange("scale must be positive")
    report = pareto_exponent(params)
    if branch == "sound":
        rho = report.rho0
    elif branch == "growing":
        rho = report.rho1
    else:
        raise OutOfRange(f"unknown branch {branch!r}")
    values = scale * np.exp(rho * grid.log_x) * modulation[grid.indices % m]
    return grid.with_values(values)


def residual(g: GridDistribution, model) -> float:
    """Relative L1 defect of ``W g - g`` on the interior window."""
    op = as_operator(model, g)
    r = op.reach
    if g.size < 2 * r + 1:
        raise EmptyInterior(f"support of {g.size} cells has no interior (shift {r})")
    out = apply_operator(g, op, cell_cap=max(DEFAULT_CELL_CAP, g.size + 2 * r))
    # out is shifted by r cells relative to g
    inner = slice(r, g.size - r)
    diff = out.values[2 * r:g.size] - g.values[inner]
    log_x = g.log_x[inner]
    denom = discrete_mass(g.values[inner], log_x, g.step)
    if denom == 0.0:
        return 0.0 if not np.any(diff) else math.inf
    return discrete_mass(diff, log_x, g.step) / denom


@dataclass(frozen=True)
class ConvergenceTrace:
    distances: np.ndarray
    epsilon: float = 0.0

    @property
    def steps(self) -> int:
        return self.distances.size - 1

    @property
    def ratios(self) -> np.ndarray:
        d = self.distances
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(d[:-1] > 0, d[1:] / np.where(d[:-1] > 0, d[:-1], 1.0), np.nan)


def iterate(g0: GridDistribution, model, n: int, *, cell_cap: int = DEFAULT_CELL_CAP,
            epsilon: float = 0.0, keep: bool = False):
    """Apply the operator ``n`` times; the trace holds the L1 norms ``d_k``.

    Returns ``(g_n, trace)``, plus the list of all iterates when ``keep``.
    """
    if n < 0:
        raise OutOfRange("n must be >= 0")
    op = as_operator(model, g0)
    if g0.size + 2 * op.reach * n > cell_cap:
        raise ResourceLimit(
            f"{n} steps would grow the grid to {g0.size + 2 * op.reach * n} cells "
            f"(cap {cell_cap})")
    g = g0
    history = [g0]
    distances = [discrete_l1(g0)]
    for _ in range(n):
        g = apply_operator(g, op, cell_cap=cell_cap)
        distances.append(discrete_l1(g))
        if keep:
            history.append(g)
    trace = ConvergenceTrace(np.array(distances), epsilon)
    if keep:
        return g, trace, history
    return g, trace


def iterate_with_source(source: GridDistribution, model, n: int, *,
                        cell_cap: int = DEFAULT_CELL_CAP) -> GridDistribution:
    """``g <- W g + s`` started from ``g = s``: the density of a population that
    is reinjected at the source after dissipation, ``sum_k W**k s`` for k<=n.
    """
    op = as_operator(model, source)
    if source.size + 2 * op.reach * n > cell_cap:
        raise ResourceLimit("source iteration would exceed the cell cap")
    g = source
    for _ in range(n):
        g = apply_operator(g, op, cell_cap=cell_cap)
        lo = g.base_index
        s = source.to_absolute(lo, lo + g.size)
        g = g.with_values(g.values + s)
    return g
