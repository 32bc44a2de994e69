"""Agent-level simulation of the betting dynamics with kill/reinjection.

Each step every agent is independently killed with probability
``1 - 1/kappa`` and respawned at ``reinject_at``; survivors bet, multiplying
their wealth by ``1 + gamma`` with probability ``p`` and dividing it
otherwise. The expected density then evolves by the dissipative operator
plus a point source at ``reinject_at``.

Randomness is counter based: the uniform used by agent ``i`` at step ``t``
is word ``i`` of the Philox stream keyed by the seed with counter word 1 set
to ``t``. Results do not depend on how agents are split across threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .closed_form import pareto_exponent
from .dirichlet import ClassMix, find_tail_root
from .estimators import TailEstimate, default_hill_k, hill_estimator
from .exceptions import NumericalFailure, OutOfRange, StationarityUnavailable
from .params import ModelParams

CHUNK = 1 << 16  # agents per work unit; a multiple of 4 (Philox block width)
THREADS_ENV = "PARETOLAB_THREADS"


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise OutOfRange(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if n < 1:
        raise OutOfRange(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def uniforms(seed: int, step: int, start: int, n: int) -> np.ndarray:
    """Uniforms for agents ``start .. start+n-1`` at ``step``; ``start % 4 == 0``."""
    bg = np.random.Philox(key=seed, counter=[start // 4, step, 0, 0])
    return np.random.Generator(bg).random(n)


@dataclass(frozen=True, eq=False)
class AgentPopulation:
    log_wealth: np.ndarray
    seed: int
    step_count: int = 0
    reinject_at: float = 1.0

    @classmethod
    def at_reinjection(cls, n_agents: int, seed: int,
                       reinject_at: float = 1.0) -> "AgentPopulation":
        if n_agents < 1:
            raise OutOfRange("need at least one agent")
        if not reinject_at > 0:
            raise OutOfRange("reinject_at must be positive")
        if not 0 <= seed < 2**64:
            raise OutOfRange("seed must fit in 64 bits")
        return cls(np.full(n_agents, math.log(reinject_at)), int(seed), 0,
                   float(reinject_at))

    @property
    def wealths(self) -> np.ndarray:
        return np.exp(self.log_wealth)

    @property
    def size(self) -> int:
        return self.log_wealth.size


def _outcomes(model) -> tuple[float, np.ndarray, np.ndarray]:
    """Kill probability, cumulative outcome weights and log-wealth moves."""
    if isinstance(model, ClassMix):
        weights, moves = [], []
        for e in model.entries:
            lam = math.log1p(e.gamma)
            weights += [e.p, e.q]
            moves += [lam, -lam]
        kappa = model.kappa
    else:
        lam = model.lam
        weights, moves, kappa = [model.p, 1.0 - model.p], [lam, -lam], model.kappa
    cum = np.cumsum(weights)
    cum[-1] = np.inf  # absorb rounding in the last bin
    return 1.0 - 1.0 / kappa, cum[:-1], np.array(moves)


def _step_chunk(log_w, seed, step, start, kill, cum, moves, reset):
    u = uniforms(seed, step, start, log_w.size)
    out = log_w.copy()
    alive = u >= kill
    if kill > 0.0:
        v = (u[alive] - kill) / (1.0 - kill)
    else:
        v = u
    out[alive] += moves[np.searchsorted(cum, v, side="right")]
    out[~alive] = reset
    return out


def mc_step(pop: AgentPopulation, model, *, workers: int | None = None) -> AgentPopulation:
    kill, cum, moves = _outcomes(model)
    reset = math.log(pop.reinject_at)
    n = pop.size
    starts = range(0, n, CHUNK)
    work = lambda s: _step_chunk(pop.log_wealth[s:s + CHUNK], pop.seed, pop.step_count,
                                 s, kill, cum, moves, reset)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or n <= CHUNK:
        parts = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, starts))
    return replace(pop, log_wealth=np.concatenate(parts), step_count=pop.step_count + 1)


@dataclass(frozen=True)
class MCResult:
    samples: np.ndarray
    tail: TailEstimate | None
    alpha_reference: float | None
    n_steps: int
    burn_in: int
    seed: int
    reinject_at: float

    def as_dict(self) -> dict:
        return {
            "n_agents": int(self.samples.size),
            "n_steps": self.n_steps,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "reinject_at": self.reinject_at,
            "tail": None if self.tail is None else self.tail.as_dict(),
            "alpha_reference": self.alpha_reference,
        }


def _reference_alpha(model) -> float | None:
    try:
        if isinstance(model, ClassMix):
            return find_tail_root(model)[1]
        return pareto_exponent(model).alpha
    except NumericalFailure:
        return None


def run_mc(model: ModelParams | ClassMix, n_agents: int, n_steps: int, burn_in: int,
           seed: int, reinject_at: float = 1.0, hill_k: int | None = None,
           estimate_tail: bool = True, workers: int | None = None) -> MCResult:
    """Simulate ``n_steps`` rounds from everyone at ``reinject_at``.

    The samples are the final wealths; ``burn_in`` must be shorter than the
    run. The Hill estimate uses ``hill_k`` (default: top 1%).
    """
    if n_steps <= burn_in or burn_in < 0:
        raise OutOfRange("need 0 <= burn_in < n_steps")
    if estimate_tail and model.kappa <= 1.0:
        raise StationarityUnavailable("stationary tail unavailable at kappa=1")
    pop = AgentPopulation.at_reinjection(n_agents, seed, reinject_at)
    for _ in range(n_steps):
        pop = mc_step(pop, model, workers=workers)
    samples = pop.wealths
    tail = None
    if estimate_tail:
        k = default_hill_k(samples.size) if hill_k is None else hill_k
        tail = hill_estimator(samples, k)
    return MCResult(samples, tail, _reference_alpha(model), n_steps, burn_in,
                    int(seed), float(reinject_at))


def survival_slope(samples, x_lo: float, min_count: int = 10) -> float:
    """Log-log slope of the empirical ``P(X >= x)`` at distinct values above
    ``x_lo``, ignoring the sparsest ``min_count`` upper samples."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    values, first = np.unique(x, return_index=True)
    surv = (n - first) / n
    keep = (values >= x_lo) & (n - first >= min_count)
    if keep.sum() < 2:
        raise OutOfRange("not enough distinct values above x_lo")
    t, y = np.log(values[keep]), np.log(surv[keep])
    tc = t - t.mean()
    return float(np.dot(tc, y - y.mean()) / np.dot(tc, tc))
