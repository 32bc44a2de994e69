"""Model parameters and the coefficients of the log-domain recurrence."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import NonFinite, OutOfRange


@dataclass(frozen=True)
class ModelParams:
    """One-class dynamics: win probability ``p``, wagered fraction ``gamma``,
    dissipative coefficient ``kappa``.

    Construct through :func:`validate_params`; the constructor runs the same
    checks so a ``ModelParams`` instance is always valid.
    """

    p: float
    gamma: float
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("p", "gamma", "kappa"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise NonFinite(f"{name} is not a number: {value!r}") from exc
            if not math.isfinite(value):
                raise NonFinite(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not 0.0 < self.p < 1.0:
            raise OutOfRange("p out of range (0,1)")
        if not self.gamma > 0.0:
            raise OutOfRange("gamma out of range (0,inf)")
        if not self.kappa >= 1.0:
            raise OutOfRange("kappa out of range [1,inf)")

    @property
    def warning(self) -> str | None:
        # agents only bet with a positive expected gain
        if self.p <= 0.5:
            return "p <= 1/2"
        return None

    @property
    def lam(self) -> float:
        return math.log1p(self.gamma)

    def replace(self, **changes) -> "ModelParams":
        fields = {"p": self.p, "gamma": self.gamma, "kappa": self.kappa}
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class DerivedCoefficients:
    """``a F(x + lam) - F(x) + b F(x - lam) = 0`` with ``F(t) = f(exp t)``."""

    lam: float
    a: float
    b: float
    # set from (p, kappa) when known; 1 - 4ab cancels badly near the double root
    disc: float | None = None

    @property
    def discriminant(self) -> float:
        if self.disc is not None:
            return self.disc
        return 1.0 - 4.0 * self.a * self.b


def validate_params(p: float, gamma: float, kappa: float = 1.0) -> ModelParams:
    return ModelParams(p, gamma, kappa)


def derive_coefficients(params: ModelParams) -> DerivedCoefficients:
    g1 = 1.0 + params.gamma
    a = (1.0 - params.p) * g1 / params.kappa
    b = params.p / (params.kappa * g1)
    k, q = params.kappa, 1.0 - 2.0 * params.p
    # 1 - 4p(1-p)/k**2 == ((k-1)(k+1) + (1-2p)**2) / k**2
    disc = ((k - 1.0) * (k + 1.0) + q * q) / (k * k)
    return DerivedCoefficients(lam=params.lam, a=a, b=b, disc=disc)
