"""Comparison sets: simplices and their complements of prescribed measure."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .analytic import AnalyticProfile, _check_dimension
from .grid import GridSet, GridSpec, simplex


class Kind(str, enum.Enum):
    SIMPLEX = "simplex"
    COMPLEMENT = "complement"


@dataclass(frozen=True)
class ExtremalSpec:
    kind: Kind
    radius: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        _check_dimension(self.n)
        if not self.radius >= 0:
            raise ValueError("radius must be non-negative")

    @property
    def measure(self) -> float:
        prof = AnalyticProfile.of(self.n)
        return prof.phi(self.radius) if self.kind is Kind.SIMPLEX else prof.psi(self.radius)

    @property
    def boundary(self) -> float:
        return AnalyticProfile.of(self.n).ball_boundary(self.radius)


def _check_measure(p, complement_mass=None):
    arr = np.asarray(p, dtype=float)
    if complement_mass is None:
        ok = (arr > 0) & (arr < 1)
    else:
        # p may round to 1 while its complement is still resolved
        q = np.asarray(complement_mass, dtype=float)
        ok = (arr > 0) & (arr <= 1) & (q > 0) & (q <= 1)
    if np.any(~ok):
        raise ValueError("measure must lie in (0, 1)")
    return arr


def extremal_for_measure(n: int, p: float, complement_mass: float | None = None) -> ExtremalSpec:
    """Simplex of measure ``p`` when ``p >= 1/2``, otherwise the complement of a simplex.

    ``complement_mass`` (``1 - p``) may be passed to keep precision when ``p``
    is close to one.
    """
    _check_measure(p, complement_mass)
    q = 1.0 - p if complement_mass is None else complement_mass
    prof = AnalyticProfile.of(n)
    if p >= 0.5:
        return ExtremalSpec(Kind.SIMPLEX, prof.radius_for_masses(p, q), n)
    return ExtremalSpec(Kind.COMPLEMENT, prof.radius_for_masses(q, p), n)


def extremal_radius(n: int, p, complement_mass=None):
    """Vectorized radius of the comparison set; ``(radius, is_simplex)``."""
    p = _check_measure(p, complement_mass)
    q = 1.0 - p if complement_mass is None else np.asarray(complement_mass, dtype=float)
    q = np.broadcast_to(q, p.shape)
    prof = AnalyticProfile.of(n)
    simplex_kind = p >= 0.5
    lower = np.where(simplex_kind, p, q)
    upper = np.where(simplex_kind, q, p)
    return np.asarray(prof.radius_for_masses(lower, upper)), simplex_kind


def isoperimetric_profile(n: int, p, complement_mass=None):
    """Boundary measure of the comparison set of measure ``p`` (vectorized)."""
    radius, _ = extremal_radius(n, p, complement_mass)
    out = AnalyticProfile.of(n).ball_boundary(radius)
    return float(out) if np.ndim(p) == 0 else out


def extremal_growth(n: int, p, h, complement_mass=None):
    """Least possible measure of the ``h``-neighbourhood of a set of measure ``p``.

    Integrating the isoperimetric inequality: a set below the median grows
    like the complement of a simplex until it reaches measure 1/2 and like a
    simplex afterwards.  Equals ``nu(B^h)`` for the comparison set ``B`` while
    ``nu(B^h) <= 1/2`` or ``p >= 1/2``.
    """
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("h must be non-negative")
    prof = AnalyticProfile.of(n)
    radius, is_simplex = extremal_radius(n, p, complement_mass)
    radius, is_simplex, h = np.broadcast_arrays(radius, is_simplex, h)
    median = prof.psi_inv(0.5)
    shrunk = radius - h
    below = ~is_simplex & (shrunk >= median)
    grow_from = np.where(is_simplex, radius + h, 2 * median - shrunk)
    out = np.where(below, prof.psi(np.maximum(shrunk, 0.0)), prof.phi(np.maximum(grow_from, 0.0)))
    return float(out) if out.ndim == 0 else out


def realize_on_grid(spec: ExtremalSpec, gspec: GridSpec) -> GridSet:
    if spec.n != gspec.n:
        raise ValueError("dimension mismatch between comparison set and grid")
    return simplex(gspec, spec.radius, complement=spec.kind is Kind.COMPLEMENT)


def profile_table(n: int, p_grid) -> list[dict]:
    """Rows ``(p, radius, kind, boundary)`` for each measure in ``p_grid``."""
    p = _check_measure(np.atleast_1d(p_grid))
    radius, is_simplex = extremal_radius(n, p)
    boundary = AnalyticProfile.of(n).ball_boundary(radius)
    return [
        {"p": float(pi), "radius": float(ri), "kind": (Kind.SIMPLEX if si else Kind.COMPLEMENT).value,
         "boundary": float(bi)}
        for pi, ri, si, bi in zip(p, radius, is_simplex, boundary)
    ]
