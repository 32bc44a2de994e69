"""Multi-class mixes: the invariance function D(rho) and its negative real root.

A power law ``x**rho`` is invariant under the multi-class operator iff
``D(rho) == 1`` where::

    D(rho) = (1/kappa) * sum_i p_i (1+g_i)**(-rho-1) + q_i (1+g_i)**(rho+1)

The win term uses the one-class weight ``p_i / (kappa (1+g_i))`` so a single
class ``(p, 1-p, g)`` reduces to the one-class recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NonFinite, NoNegativeRoot, NoRoot, OutOfRange

MASS_TOL = 1e-12
# a minimum of D within this of 1 is a double (tangent) root, treated as no
# simple root, like the zero-discriminant point of the one-class model
TANGENT_TOL = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ClassEntry:
    p: float
    q: float
    gamma: float


@dataclass(frozen=True)
class ClassMix:
    entries: tuple[ClassEntry, ...]
    kappa: float = 1.0

    def __post_init__(self):
        entries = tuple(
            e if isinstance(e, ClassEntry) else ClassEntry(*map(float, e))
            for e in self.entries
        )
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise OutOfRange("a class mix needs at least one entry")
        values = [v for e in entries for v in (e.p, e.q, e.gamma)] + [self.kappa]
        if not all(math.isfinite(v) for v in values):
            raise NonFinite("class mix parameters must be finite")
        for e in entries:
            if e.p < 0 or e.q < 0:
                raise OutOfRange("class weights p_i, q_i must be >= 0")
            if not e.gamma > 0:
                raise OutOfRange("class gamma_i must be > 0")
        total = sum(e.p + e.q for e in entries)
        if abs(total - 1.0) > MASS_TOL:
            raise OutOfRange(f"sum of p_i + q_i is {total!r}, expected 1")
        if not self.kappa >= 1.0:
            raise OutOfRange("kappa out of range [1,inf)")

    @classmethod
    def single(cls, p: float, gamma: float, kappa: float) -> "ClassMix":
        return cls((ClassEntry(p, 1.0 - p, gamma),), kappa)

    @classmethod
    def from_dict(cls, doc: dict) -> "ClassMix":
        try:
            entries = tuple(
                ClassEntry(float(c["p"]), float(c["q"]), float(c["gamma"]))
                for c in doc["classes"]
            )
            return cls(entries, float(doc["kappa"]))
        except (KeyError, TypeError) as exc:
            raise OutOfRange(f"malformed class mix document: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "classes": [{"p": e.p, "q": e.q, "gamma": e.gamma} for e in self.entries],
        }

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        p = np.array([e.p for e in self.entries])
        q = np.array([e.q for e in self.entries])
        lam = np.log1p([e.gamma for e in self.entries])
        return p, q, lam


def characteristic_value(mix: ClassMix, rho: float) -> float:
    p, q, lam = mix.arrays()
    s = rho + 1.0
    return float(np.sum(p * np.exp(-s * lam) + q * np.exp(s * lam)) / mix.kappa)


def _minimize(fun, lo: float = -1.0, hi: float = 1.0, tol: float = 1e-12):
    # expand until the minimizer of a convex function is bracketed
    flo, fhi = fun(lo), fun(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = fun(mid)
        if fmid <= flo and fmid <= fhi:
            break
        width = hi - lo
        if flo < fhi:
            lo, flo = lo - width, fun(lo - width)
        else:
            hi, fhi = hi + width, fun(hi + width)
    else:
        raise NoRoot("could not bracket the minimum of D")
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while hi - lo > tol * (1.0 + abs(c)):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = fun(d)
    x = 0.5 * (lo + hi)
    return x, fun(x)


def _bisect(fun, lo: float, hi: float) -> float:
    """Root of ``fun`` with ``fun(lo) > 0 > fun(hi)`` or the reverse."""
    flo = fun(lo)
    while True:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fmid = fun(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    fl, fh = fun(lo), fun(hi)
    return lo if abs(fl) <= abs(fh) else hi


def _check_minimum(mix: ClassMix) -> tuple[float, float]:
    rmin, dmin = _minimize(lambda r: characteristic_value(mix, r))
    if dmin >= 1.0 - TANGENT_TOL:
        raise NoRoot(f"min D = {dmin!r} is not below 1; no simple root of D = 1")
    return rmin, dmin


def find_tail_root(mix: ClassMix) -> tuple[float, float]:
    """Negative real root ``rho0`` of ``D(rho) = 1``; returns ``(rho0, -rho0)``.

    Since ``D(-1) = 1/kappa <= 1`` a valid mix always has a root at or below
    -1; the errors guard the tangent case (``kappa = 1`` with ``-1`` the
    minimizer) and inputs built outside :class:`ClassMix` validation.
    """
    excess = lambda r: characteristic_value(mix, r) - 1.0
    rmin, dmin = _check_minimum(mix)
    step = 1.0
    lo = rmin - step
    while excess(lo) < 0.0:
        step *= 2.0
        lo = rmin - step
    rho0 = _bisect(excess, lo, rmin)
    if rho0 >= 0.0:
        raise NoNegativeRoot(f"both roots of D = 1 are >= 0 (smaller is {rho0!r})")
    return rho0, -rho0


def find_roots(mix: ClassMix) -> tuple[float, float]:
    """Both real roots of ``D(rho) = 1``, smaller first."""
    excess = lambda r: characteristic_value(mix, r) - 1.0
    rmin, _ = _check_minimum(mix)
    roots = []
    for sign in (-1.0, 1.0):
        step = 1.0
        while excess(rmin + sign * step) < 0.0:
            step *= 2.0
        roots.append(_bisect(excess, rmin, rmin + sign * step))
    return roots[0], roots[1]


def common_step(mix: ClassMix, m: int, tol: float = 1e-9) -> tuple[float, list[int]] | None:
    """Grid step aligned to every class, or None when the gammas are incommensurate.

    The step is ``log(1+g_0) / m``; every class shift must be an integer
    number of steps to within ``tol`` relative.
    """
    _, _, lam = mix.arrays()
    h = lam[0] / m
    shifts = []
    for li in lam:
        n = li / h
        r = round(n)
        if r < 1 or abs(n - r) > tol * max(1.0, n):
            return None
        shifts.append(int(r))
    return h, shifts
