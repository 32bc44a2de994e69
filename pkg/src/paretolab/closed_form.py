"""Characteristic quadratic, Pareto exponent, sweeps and the kappa derivative."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateDiscriminant, OutOfRange
from .params import DerivedCoefficients, ModelParams, derive_coefficients

SWEEPABLE = ("p", "gamma", "kappa")


@dataclass(frozen=True)
class ExponentReport:
    params: ModelParams
    coeffs: DerivedCoefficients
    x1: float
    x2: float
    rho0: float
    rho1: float
    alpha: float
    # the two displayed closed forms, evaluated literally
    alpha_form1: float
    alpha_form2: float

    def as_dict(self) -> dict:
        return {
            "p": self.params.p,
            "gamma": self.params.gamma,
            "kappa": self.params.kappa,
            "lambda": self.coeffs.lam,
            "a": self.coeffs.a,
            "b": self.coeffs.b,
            "x1": self.x1,
            "x2": self.x2,
            "rho0": self.rho0,
            "rho1": self.rho1,
            "alpha": self.alpha,
        }


def characteristic_roots(coeffs: DerivedCoefficients) -> tuple[float, float]:
    """Roots ``x1 < x2`` of ``a y**2 - y + b = 0``; ``x1 < 1`` always, while
    ``x2 > 1`` only when ``a + b < 1``.

    Uses ``x1 = 2b / (1 + sqrt(D))`` and ``x2 = (1 + sqrt(D)) / (2a)`` so
    neither root subtracts nearly equal numbers.
    """
    disc = coeffs.discriminant
    if not disc > 0.0:
        raise DegenerateDiscriminant(
            f"discriminant 1-4ab = {disc!r} <= 0 (double root at p=1/2, kappa=1)"
        )
    s = 1.0 + math.sqrt(disc)
    return 2.0 * coeffs.b / s, s / (2.0 * coeffs.a)


def alpha_form1(coeffs: DerivedCoefficients) -> float:
    """``-log((1 - sqrt(1 - 4ab)) / (2a)) / lam``."""
    return -math.log((1.0 - math.sqrt(1.0 - 4.0 * coeffs.a * coeffs.b))
                     / (2.0 * coeffs.a)) / coeffs.lam


def alpha_form2(params: ModelParams) -> float:
    """``1 - log((k - sqrt(k**2 - 4p(1-p))) / (2(1-p))) / log(1+gamma)``."""
    p, k = params.p, params.kappa
    y = (k - math.sqrt(k * k - 4.0 * p * (1.0 - p))) / (2.0 * (1.0 - p))
    return 1.0 - math.log(y) / params.lam


def pareto_exponent(params: ModelParams) -> ExponentReport:
    coeffs = derive_coefficients(params)
    x1, x2 = characteristic_roots(coeffs)
    rho0 = math.log(x1) / coeffs.lam
    rho1 = math.log(x2) / coeffs.lam
    return ExponentReport(
        params=params,
        coeffs=coeffs,
        x1=x1,
        x2=x2,
        rho0=rho0,
        rho1=rho1,
        alpha=-rho0,
        alpha_form1=alpha_form1(coeffs),
        alpha_form2=alpha_form2(params),
    )


def alpha_of(p: float, gamma: float, kappa: float) -> float:
    return pareto_exponent(ModelParams(p, gamma, kappa)).alpha


def exponent_sweep(params: ModelParams, which: str, start: float, stop: float,
                   steps: int) -> np.ndarray:
    """Table of ``(value, alpha)`` rows, endpoints inclusive."""
    if which not in SWEEPABLE:
        raise OutOfRange(f"cannot sweep {which!r}; choose one of {SWEEPABLE}")
    if steps < 1:
        raise OutOfRange("steps must be >= 1")
    if steps == 1:
        values = np.array([float(start)])
    else:
        values = np.linspace(start, stop, steps)
    table = np.empty((steps, 2))
    for i, v in enumerate(values):
        table[i] = v, pareto_exponent(params.replace(**{which: float(v)})).alpha
    return table


def dalpha_dkappa_fd(params: ModelParams, h: float = 1e-5) -> float:
    """Central difference of alpha in kappa."""
    if not h > 0.0:
        raise OutOfRange("h must be positive")
    if params.kappa - h < 1.0:
        raise OutOfRange(f"kappa - h = {params.kappa - h} is below 1")
    up = pareto_exponent(params.replace(kappa=params.kappa + h)).alpha
    down = pareto_exponent(params.replace(kappa=params.kappa - h)).alpha
    return (up - down) / (2.0 * h)


def dalpha_dkappa(params: ModelParams) -> float:
    """``1 / (log(1+gamma) * sqrt(kappa**2 - 4p(1-p)))``."""
    p, k = params.p, params.kappa
    return 1.0 / (params.lam * math.sqrt(k * k - 4.0 * p * (1.0 - p)))
