"""Closed-form quantities for the product exponential measure on the orthant.

The measure of the l1 simplex ``t B`` is the regularized lower incomplete
gamma function ``P(n, t)``; its complement has measure ``Q(n, t)``.  Both
are evaluated with the classical split: power series below ``t = n + 1``,
Lentz continued fraction above it.  All routines accept scalars or numpy
arrays and return the same shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DIMENSION = 20
POISSON_MAX_RATE = 700.0

_EPS = np.finfo(float).eps
_TINY = 1e-300
_MAX_ITER = 500
_BISECT_WIDTH = 1e-13


def _check_dimension(n) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ValueError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"dimension {n} outside supported range 1..{MAX_DIMENSION}")
    return n


def _as_radius(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)):
        raise ValueError("radius is NaN")
    if np.any(arr < 0):
        raise ValueError("radius must be non-negative")
    return arr


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def normalizing_constant(n: int) -> float:
    """``1 / (n-1)!``, the constant making ``C_n e^{-t} t^{n-1}`` a density."""
    n = _check_dimension(n)
    return 1.0 / math.factorial(n - 1)


def _lower_series(a: float, x: np.ndarray) -> np.ndarray:
    # P(a, x) = e^{-x} x^a / Gamma(a+1) * sum_k x^k / ((a+1)...(a+k))
    term = np.ones_like(x)
    total = np.ones_like(x)
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term = term * x / denom
        total = total + term
        if np.all(term <= total * _EPS):
            break
    with np.errstate(divide="ignore"):
        logpref = -x + a * np.log(x) - math.lgamma(a + 1.0)
    return np.where(x > 0, np.exp(logpref) * total, 0.0)


def _upper_fraction(a: float, x: np.ndarray) -> np.ndarray:
    # modified Lentz evaluation of the continued fraction for Q(a, x), x >= a + 1
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= _EPS):
            break
    logpref = -x + a * np.log(x) - math.lgamma(a)
    return np.exp(logpref) * h


def _gamma_pair(n: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(P(n, t), Q(n, t))`` with the smaller one computed directly."""
    t = np.atleast_1d(t)
    lower = np.empty_like(t)
    upper = np.empty_like(t)
    finite = np.isfinite(t)
    series = finite & (t < n + 1.0)
    frac = finite & ~series
    if series.any():
        lower[series] = _lower_series(float(n), t[series])
        upper[series] = 1.0 - lower[series]
    if frac.any():
        upper[frac] = _upper_fraction(float(n), t[frac])
        lower[frac] = 1.0 - upper[frac]
    lower[~finite] = 1.0
    upper[~finite] = 0.0
    return lower, upper


def _solve_radius(n: int, lower_mass, upper_mass) -> np.ndarray:
    """Radius ``t`` with ``P(n, t) = lower_mass`` and ``Q(n, t) = upper_mass``.

    The two masses must sum to one; both are passed so that whichever is
    smaller keeps its full relative precision.
    """
    p = np.atleast_1d(np.asarray(lower_mass, dtype=float))
    q = np.atleast_1d(np.asarray(upper_mass, dtype=float))
    use_lower = p < q

    def too_small(t):
        lo_mass, up_mass = _gamma_pair(n, t)
        return np.where(use_lower, lo_mass < p, up_mass > q)

    lo = np.zeros_like(q)
    hi = np.full_like(q, n + 1.0)
    grow = too_small(hi)
    while grow.any():
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, hi * 2.0, hi)
        if np.any(hi > 1e5):
            raise ArithmeticError("radius bracket did not close")
        grow = too_small(hi)
    for _ in range(200):
        wide = (hi - lo) > _BISECT_WIDTH
        if not wide.any():
            break
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        if stuck.all():
            break
        small = too_small(mid)
        lo = np.where(wide & small, mid, lo)
        hi = np.where(wide & ~small, mid, hi)
    else:
        raise ArithmeticError("bisection did not converge")
    t = 0.5 * (lo + hi)
    # Newton polish on the well-conditioned tail, kept inside the bracket
    for _ in range(3):
        lo_mass, up_mass = _gamma_pair(n, t)
        resid = np.where(use_lower, lo_mass - p, q - up_mass)
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.exp(-t + (n - 1) * np.log(np.where(t > 0, t, 1.0)) - math.lgamma(n))
            step = np.where(dens > 0, resid / dens, 0.0)
        cand = t - step
        ok = np.isfinite(cand) & (cand >= lo - _BISECT_WIDTH) & (cand <= hi + _BISECT_WIDTH)
        t = np.where(ok, np.maximum(cand, 0.0), t)
    return np.where(p <= 0.0, 0.0, t)


@dataclass(frozen=True)
class AnalyticProfile:
    """Radial measure functions of the exponential measure in dimension ``n``."""

    n: int
    c_n: float

    @classmethod
    def of(cls, n: int) -> "AnalyticProfile":
        n = _check_dimension(n)
        return cls(n=n, c_n=normalizing_constant(n))

    def phi(self, t):
        """Measure of the simplex ``t B``."""
        arr = _as_radius(t)
        lower, _ = _gamma_pair(self.n, arr.ravel())
        return _out(lower.reshape(arr.shape), t)

    def psi(self, t):
        """Measure of the orthant minus ``t B``."""
        arr = _as_radius(t)
        _, upper = _gamma_pair(self.n, arr.ravel())
        return _out(upper.reshape(arr.shape), t)

    def phi_psi(self, t):
        arr = _as_radius(t)
        lower, upper = _gamma_pair(self.n, arr.ravel())
        return _out(lower.reshape(arr.shape), t), _out(upper.reshape(arr.shape), t)

    def phi_inv(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr >= 0) & (arr < 1))):
            raise ValueError("phi_inv needs 0 <= p < 1")
        res = _solve_radius(self.n, arr.ravel(), (1.0 - arr).ravel()).reshape(arr.shape)
        return _out(res, p)

    def psi_inv(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0) & (arr <= 1))):
            raise ValueError("psi_inv needs 0 < p <= 1")
        res = _solve_radius(self.n, (1.0 - arr).ravel(), arr.ravel()).reshape(arr.shape)
        return _out(res, p)

    def radius_for_masses(self, lower, upper):
        """Radius whose simplex has measure ``lower`` and complement ``upper``."""
        lo = np.asarray(lower, dtype=float)
        up = np.asarray(upper, dtype=float)
        if np.any(lo < 0) or np.any(up < 0) or np.any(up == 0):
            raise ValueError("masses must be non-negative with a positive upper tail")
        res = _solve_radius(self.n, lo.ravel(), up.ravel()).reshape(np.broadcast(lo, up).shape)
        return _out(res, lower)

    def ball_boundary(self, t):
        """Boundary measure ``C_n e^{-t} t^{n-1}`` of the simplex (and of its complement)."""
        arr = _as_radius(t)
        finite = np.isfinite(arr)
        safe = np.where(finite & (arr > 0), arr, 1.0)
        if self.n == 1:
            res = np.exp(-safe)
            res = np.where(arr > 0, res, 1.0)
        else:
            res = np.exp(-safe + (self.n - 1) * np.log(safe) - math.lgamma(self.n))
            res = np.where(arr > 0, res, 0.0)
        res = np.where(finite, res, 0.0)
        return _out(res, t)

    def trapezoid_measure(self, spec: "TrapezoidSpec") -> float:
        return self.trapezoid_masses(spec)[0]

    def trapezoid_masses(self, spec: "TrapezoidSpec") -> tuple[float, float]:
        """``(measure, 1 - measure)``, each computed without cancellation."""
        lo_a, up_a = self.phi_psi(spec.a)
        lo_b, up_b = self.phi_psi(spec.b)
        inside = up_a - up_b if lo_b > 0.5 else lo_b - lo_a
        return inside, lo_a + up_b

    def trapezoid_boundary(self, spec: "TrapezoidSpec") -> float:
        inner = self.ball_boundary(spec.a) if spec.a > 0 else 0.0
        outer = self.ball_boundary(spec.b) if math.isfinite(spec.b) else 0.0
        return inner + outer


@dataclass(frozen=True)
class TrapezoidSpec:
    """The shell ``{a < |x|_1 < b}``; ``b`` may be ``math.inf``."""

    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b):
            raise ValueError(f"trapezoid needs 0 <= a < b, got a={self.a}, b={self.b}")


def phi(n: int, t):
    return AnalyticProfile.of(n).phi(t)


def psi(n: int, t):
    return AnalyticProfile.of(n).psi(t)


def phi_inv(n: int, p):
    return AnalyticProfile.of(n).phi_inv(p)


def psi_inv(n: int, p):
    return AnalyticProfile.of(n).psi_inv(p)


def ball_boundary(n: int, t):
    return AnalyticProfile.of(n).ball_boundary(t)


def median_radius(n: int) -> float:
    """Radius at which the simplex carries half of the mass."""
    return AnalyticProfile.of(n).psi_inv(0.5)


def poisson_cdf(k: int, lam: float) -> float:
    """``P(Poisson(lam) <= k)`` by the forward term recurrence."""
    if int(k) != k or k < 0:
        raise ValueError("k must be a non-negative integer")
    if not lam > 0:
        raise ValueError("rate must be positive")
    if lam > POISSON_MAX_RATE:
        raise OverflowError(f"rate {lam} exceeds {POISSON_MAX_RATE}; e^-rate underflows")
    term = math.exp(-lam)
    total = term
    for j in range(1, int(k) + 1):
        term *= lam / j
        total += term
    return min(total, 1.0)


def poisson_median(lam: float) -> int:
    """Smallest integer ``l`` with ``P(Poisson(lam) <= l) >= 1/2``."""
    if not lam > 0 or lam > POISSON_MAX_RATE:
        raise ValueError("rate must lie in (0, 700]")
    term = math.exp(-lam)
    total = term
    l = 0
    while total < 0.5:
        l += 1
        term *= lam / l
        total += term
    return l
