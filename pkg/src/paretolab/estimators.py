"""Tail-exponent estimation.

All estimates report the density exponent ``alpha`` (f(x) ~ x**-alpha) and
the survival exponent ``zeta = alpha - 1`` (P(X > x) ~ x**-zeta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import (DegenerateSample, EmptyWindow, NonPositiveDensity,
                         NonPositiveSample, OutOfRange)
from .log_grid import GridDistribution


@dataclass(frozen=True)
class TailEstimate:
    alpha_hat: float
    zeta_hat: float
    k: int | tuple[int, int]
    stderr: float | None = None

    def as_dict(self) -> dict:
        k = list(self.k) if isinstance(self.k, tuple) else self.k
        return {"alpha_hat": self.alpha_hat, "zeta_hat": self.zeta_hat,
                "k": k, "stderr": self.stderr}


def default_hill_k(n: int, fraction: float = 0.01) -> int:
    """``ceil(fraction * n)`` clamped to ``[10, n // 10]``; the upper bound
    wins for samples under 100 (never below 2)."""
    k = max(10, math.ceil(fraction * n))
    return int(max(2, min(k, n // 10)))


def _log_order_statistics(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size and not np.all(x > 0):
        raise NonPositiveSample("Hill estimation needs strictly positive samples")
    return np.sort(np.log(x))[::-1]


def hill_estimator(samples, k: int) -> TailEstimate:
    logs = _log_order_statistics(samples)
    return _hill_sorted(logs, k)


def _hill_sorted(logs: np.ndarray, k: int) -> TailEstimate:
    n = logs.size
    if int(k) != k or k < 2:
        raise OutOfRange("Hill k must be an integer >= 2")
    k = int(k)
    if n < k + 1:
        raise OutOfRange(f"Hill k={k} needs at least {k + 1} samples, got {n}")
    mean_excess = float(np.mean(logs[:k] - logs[k]))
    if mean_excess <= 0.0:
        raise DegenerateSample("top order statistics are all equal")
    zeta = 1.0 / mean_excess
    return TailEstimate(zeta + 1.0, zeta, k, zeta / math.sqrt(k))


def hill_plateau(samples, ks) -> list[TailEstimate]:
    """Hill estimates over several k, for eyeballing the plateau."""
    logs = _log_order_statistics(samples)
    return [_hill_sorted(logs, k) for k in ks]


def _ls_slope(t: np.ndarray, y: np.ndarray) -> float:
    tc = t - t.mean()
    return float(np.dot(tc, y - y.mean()) / np.dot(tc, tc))


def loglog_slope(g: GridDistribution, window: tuple[int, int] | None = None,
                 whole_periods: bool = True) -> TailEstimate:
    """Least-squares slope of ``log f`` against ``log x`` over ``window``.

    ``window`` is a half-open range of array positions into ``g.values``.
    With ``whole_periods`` the window is trimmed to a multiple of ``m`` cells
    and the regression runs on per-period means, which removes any
    ``m``-periodic modulation exactly.
    """
    start, stop = (0, g.size) if window is None else window
    if not 0 <= start < stop <= g.size:
        raise EmptyWindow(f"window {window} is outside the support (0, {g.size})")
    m = g.m if whole_periods else 1
    stop = start + (stop - start) // m * m
    if stop - start < 3 or (stop - start) // m < 2:
        raise EmptyWindow("regression window needs >= 3 cells and >= 2 periods")
    f = g.values[start:stop]
    if not np.all(f > 0):
        raise NonPositiveDensity("log-log regression needs positive densities")
    t = g.log_x[start:stop]
    y = np.log(f)
    if m > 1:
        t = t.reshape(-1, m).mean(axis=1)
        y = y.reshape(-1, m).mean(axis=1)
    alpha = -_ls_slope(t, y)
    return TailEstimate(alpha, alpha - 1.0, (start, stop))


class HillTailEstimator(BaseEstimator):
    """Hill estimator with a scikit-learn interface.

    Parameters
    ----------
    k : int or None
        Number of upper order statistics. ``None`` uses ``k_fraction`` of the
        sample, clamped to ``[10, n // 10]``.
    k_fraction : float
        Fraction of the sample used when ``k`` is None.

    Attributes
    ----------
    alpha_, zeta_ : fitted density and survival exponents.
    stderr_ : asymptotic standard error of ``zeta_``.
    k_ : order statistics used.
    threshold_ : the (k+1)-th largest sample, where the fitted tail starts.
    """

    def __init__(self, k=None, k_fraction=0.01):
        self.k = k
        self.k_fraction = k_fraction

    def fit(self, X, y=None):
        X = check_array(X, ensure_2d=False, dtype=float).ravel()
        k = self.k if self.k is not None else default_hill_k(X.size, self.k_fraction)
        logs = _log_order_statistics(X)
        est = _hill_sorted(logs, k)
        self.alpha_, self.zeta_, self.stderr_, self.k_ = (
            est.alpha_hat, est.zeta_hat, est.stderr, est.k)
        self.threshold_ = float(np.exp(logs[self.k_]))
        self.n_samples_ = X.size
        return self

    def survival(self, X):
        """Fitted ``P(X > x)`` for ``x`` above ``threshold_``."""
        check_is_fitted(self, "zeta_")
        X = np.asarray(X, dtype=float)
        return (self.k_ / self.n_samples_) * (X / self.threshold_) ** -self.zeta_

    def estimate(self) -> TailEstimate:
        check_is_fitted(self, "zeta_")
        return TailEstimate(self.alpha_, self.zeta_, self.k_, self.stderr_)


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """Least-squares power law ``f = C * x**-alpha`` on log-log axes.

    ``period`` averages consecutive blocks of that many points before the
    fit (use ``m`` for densities sampled on an aligned log grid).
    """

    def __init__(self, period=1):
        self.period = period

    def fit(self, X, y):
        X = check_array(X, ensure_2d=False, dtype=float).ravel()
        y = check_array(y, ensure_2d=False, dtype=float).ravel()
        if X.shape != y.shape:
            raise OutOfRange("X and y must have the same length")
        if not (np.all(X > 0) and np.all(y > 0)):
            raise NonPositiveDensity("power-law fits need positive x and f")
        n = X.size // self.period * self.period
        if n // self.period < 2 or n < 3:
            raise EmptyWindow("not enough points for a power-law fit")
        t, v = np.log(X[:n]), np.log(y[:n])
        if self.period > 1:
            t = t.reshape(-1, self.period).mean(axis=1)
            v = v.reshape(-1, self.period).mean(axis=1)
        slope = _ls_slope(t, v)
        self.alpha_ = -slope
        self.intercept_ = float(v.mean() - slope * t.mean())
        return self

    def predict(self, X):
        check_is_fitted(self, "alpha_")
        X = np.asarray(X, dtype=float).ravel()
        return np.exp(self.intercept_) * X ** -self.alpha_
