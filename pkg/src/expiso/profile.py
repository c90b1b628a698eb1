"""Diagonal section lengths of planar sets and the anchored rearrangement.

For a planar set ``A`` let ``f(t)`` be the length of ``A`` on the segment
``S_t = {x + y = t}`` of the quadrant.  Then ``nu(A) = int f(t) e^{-t} dt / sqrt 2``.

On a grid the cells with ``i + j = d`` are cut by ``S_t`` along their
diagonal at ``t_d = (d + 1) delta``, where each contributes ``sqrt(2) delta``.
Between consecutive ``t_d`` every cell's contribution is linear, so the
profile of a cell union is exactly the piecewise linear interpolation of
its samples, starting from ``f(0) = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import GridSet, GridSpec, MeasureEstimate

SQRT2 = math.sqrt(2.0)
SLICE_SLACK_CELLS = 2


@dataclass(frozen=True, eq=False)
class DiagonalProfile:
    """Samples ``lengths[k] = f((k + 1) delta_t)``, linearly interpolated.

    ``f(0) = 0``.  After the last sample the profile ramps linearly over one
    step to ``0``, or, when ``tail`` is set, to the full section ``sqrt(2) t``
    which it keeps from then on.
    """

    delta_t: float
    lengths: np.ndarray
    tail: bool = False

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float)
        if lengths.ndim != 1:
            raise ValueError("lengths must be one-dimensional")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")
        if np.any(lengths < 0):
            raise ValueError("section lengths must be non-negative")
        t = self.t_grid_for(lengths.size)
        if np.any(lengths > SQRT2 * t * (1 + 1e-12)):
            raise ValueError("section length exceeds sqrt(2) t")
        lengths.setflags(write=False)
        object.__setattr__(self, "lengths", lengths)

    def t_grid_for(self, size):
        return (np.arange(size) + 1.0) * self.delta_t

    @property
    def t_grid(self) -> np.ndarray:
        return self.t_grid_for(self.lengths.size)

    @classmethod
    def sample(cls, f, delta_t: float, t_max: float, tail: bool = False) -> "DiagonalProfile":
        """Sample a vectorized ``f`` at ``delta_t, 2 delta_t, ...`` up to ``t_max``."""
        count = int(math.floor(t_max / delta_t + 1e-9))
        t = (np.arange(count) + 1.0) * delta_t
        return cls(delta_t, np.asarray(f(t), dtype=float), tail)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        knots_t = np.concatenate(([0.0], self.t_grid))
        knots_f = np.concatenate(([0.0], self.lengths))
        last = knots_t[-1] + self.delta_t
        end = SQRT2 * last if self.tail else 0.0
        knots_t = np.append(knots_t, last)
        knots_f = np.append(knots_f, end)
        out = np.interp(t, knots_t, knots_f)
        if self.tail:
            out = np.where(t > last, SQRT2 * t, out)
        else:
            out = np.where(t > last, 0.0, out)
        return out

    def support(self) -> tuple[float, float] | None:
        """Closed hull of ``{f > 0}`` (``inf`` upper end for tail profiles)."""
        nz = np.flatnonzero(self.lengths > 0)
        if nz.size == 0:
            return (self.t_grid[-1] + self.delta_t, math.inf) if self.tail else None
        lo = nz[0] * self.delta_t
        hi = math.inf if self.tail else (nz[-1] + 2) * self.delta_t
        return lo, hi


def _diagonal_capacity(d, rows, cols):
    """Cells of an ``rows x cols`` box on anti-diagonal ``d`` (relative to its corner)."""
    d = np.asarray(d)
    return np.clip(np.minimum(np.minimum(d + 1, rows + cols - 1 - d), min(rows, cols)), 0, None)


def _grid_counts(A: GridSet) -> np.ndarray:
    """Occupied in-box cells on every anti-diagonal ``d = 0 .. 2N - 2``."""
    N = A.spec.cells
    counts = np.zeros(2 * N - 1, dtype=np.int64)
    if A.block.size:
        c = kernels.diagonal_counts(A.block)
        off = A.origin[0] + A.origin[1]
        counts[off:off + c.size] += c
    if A.fill:
        d = np.arange(2 * N - 1)
        counts += _diagonal_capacity(d, N, N)
        if A.block.size:
            r, c = A.block.shape
            dd = np.arange(r + c - 1)
            off = A.origin[0] + A.origin[1]
            counts[off:off + dd.size] -= _diagonal_capacity(dd, r, c)
    return counts


def _require_plane(A):
    if A.n != 2:
        raise ValueError("diagonal profiles are defined in the plane only")


def profile_of(A: GridSet) -> DiagonalProfile:
    _require_plane(A)
    spec = A.spec
    counts = _grid_counts(A)
    lengths = SQRT2 * spec.delta * counts.astype(float)
    if A.includes_tail:
        # the part of S_t outside the box, all of it in the set
        t = (np.arange(counts.size) + 1.0) * spec.delta
        lengths = lengths + 2 * SQRT2 * np.clip(t - spec.x_max, 0.0, None)
    return DiagonalProfile(spec.delta, lengths, tail=A.includes_tail)


def measure_from_profile(p: DiagonalProfile) -> MeasureEstimate:
    """Trapezoidal quadrature of ``f(t) e^{-t} / sqrt 2``.

    The bound has two parts per step: the trapezoid error of the linear
    interpolant, ``dt^3/12 max|g''|`` with ``g'' = (f - 2 f') e^{-t}/sqrt 2``,
    and ``dt |df| e^{-t_l} / sqrt 2``, which covers any ``f`` monotone between
    neighbouring samples (the total-variation term).
    """
    dt = p.delta_t
    t = np.concatenate(([0.0], p.t_grid, [p.t_grid[-1] + dt if p.lengths.size else dt]))
    f = np.concatenate(([0.0], p.lengths, [0.0]))
    if p.tail:
        f[-1] = SQRT2 * t[-1]
    g = f * np.exp(-t) / SQRT2
    value = float(np.sum(0.5 * dt * (g[1:] + g[:-1])))
    df = np.diff(f)
    fmax = np.maximum(f[1:], f[:-1])
    decay = np.exp(-t[:-1]) / SQRT2
    trap = dt ** 3 / 12.0 * (fmax + 2.0 * np.abs(df) / dt) * decay
    tv = dt * np.abs(df) * decay
    err = float(np.sum(trap + tv))
    if p.tail:
        end = t[-1]
        value += (1.0 + end) * math.exp(-end)
    return MeasureEstimate(min(max(value, 0.0), 1.0), err)


def _anchored_bounds(counts, N):
    """Per diagonal: first in-box ``j`` and in-box capacity."""
    d = np.arange(counts.size)
    jmin = np.maximum(0, d - N + 1)
    cap = _diagonal_capacity(d, N, N)
    return jmin, cap


def symmetrize(A: GridSet) -> GridSet:
    """Push every diagonal section against the x-axis, keeping its cell count.

    Diagonal ``d`` keeps ``c_d`` cells, those with the smallest ``j``
    (largest ``i``).  Cell masses are constant along a diagonal, so the
    measure is preserved exactly.
    """
    _require_plane(A)
    spec, N = A.spec, A.spec.cells
    counts = _grid_counts(A)
    jmin, cap = _anchored_bounds(counts, N)
    if A.includes_tail and np.any(counts[N - 1:] < cap[N - 1:]):
        raise ValueError("a set containing the tail must have full sections beyond the box")
    # cells that differ from the fill value, as j-ranges per diagonal
    if A.fill:
        j_lo, j_hi = jmin + counts, jmin + cap
    else:
        j_lo, j_hi = jmin, jmin + counts
    active = np.flatnonzero(j_hi > j_lo)
    if active.size == 0:
        return GridSet(spec, (0, 0), np.zeros((0, 0), dtype=bool), fill=A.fill, includes_tail=A.includes_tail)
    d = active
    lo = (int(np.min(d - (j_hi[d] - 1))), int(np.min(j_lo[d])))
    hi = (int(np.max(d - j_lo[d])) + 1, int(np.max(j_hi[d] - 1)) + 1)
    rows, cols = hi[0] - lo[0], hi[1] - lo[1]
    block = np.empty((rows, cols), dtype=bool)
    jj = np.arange(lo[1], hi[1])
    step = max(1, (1 << 22) // max(cols, 1))
    for r0 in range(0, rows, step):
        ii = np.arange(lo[0] + r0, min(lo[0] + r0 + step, hi[0]))[:, None]
        diag = ii + jj[None, :]
        occupied = (jj[None, :] - jmin[diag]) < counts[diag]
        block[r0:r0 + ii.shape[0]] = occupied
    return GridSet(spec, lo, block, fill=A.fill, includes_tail=A.includes_tail)


def diagonal_steps(spec: GridSpec, t: float) -> int:
    """Index ``d`` of the diagonal sampled at ``t = (d + 1) delta``."""
    return spec.steps(t) - 1


def _section_intervals(A: GridSet, d: int) -> np.ndarray:
    """Occupied ``i`` indices of the in-box cells on diagonal ``d``."""
    N = A.spec.cells
    i = np.arange(max(0, d - N + 1), min(d, N - 1) + 1)
    if i.size == 0:
        return i
    j = d - i
    occ = np.full(i.size, A.fill)
    if A.block.size:
        (r0, c0), (r1, c1) = A.window
        inside = (i >= r0) & (i < r1) & (j >= c0) & (j < c1)
        occ[inside] = A.block[i[inside] - r0, j[inside] - c0]
    return i[occ]


def _dilated_section_count(i_src, m, d_target, N):
    """Cells on diagonal ``d_target`` reached from the source cells ``i_src`` by T-offsets of l1 length ``|m|``."""
    if i_src.size == 0:
        return 0
    lo_i = max(0, d_target - N + 1)
    hi_i = min(d_target, N - 1)
    if m >= 0:
        starts, ends = i_src, i_src + m
    else:
        starts, ends = i_src + m, i_src
    starts = np.clip(starts, lo_i, None)
    ends = np.clip(ends, None, hi_i)
    keep = ends >= starts
    starts, ends = starts[keep], ends[keep]
    if starts.size == 0:
        return 0
    order = np.argsort(starts, kind="stable")
    starts, ends = starts[order], ends[order]
    reach = np.maximum.accumulate(ends)
    # a new run starts where the interval begins past everything before it
    new_run = np.concatenate(([True], starts[1:] > reach[:-1] + 1))
    run_id = np.cumsum(new_run) - 1
    run_start = starts[new_run]
    run_end = np.zeros(run_start.size, dtype=np.int64)
    np.maximum.at(run_end, run_id, ends)
    return int(np.sum(run_end - run_start + 1))


def slice_growth_check(A: GridSet, s: float, t: float, h: float):
    """Compare the ``hT``-growth of one diagonal section of ``A`` with that of its anchored version.

    The section of ``A`` on ``S_t`` is dilated by ``hT`` and measured on
    ``S_s``; the same is done for the anchored interval of equal length.
    Lengths are in-box lengths.  Passes when the first is at least the second
    minus two cells.
    """
    from .verify import VerificationReport

    _require_plane(A)
    spec = A.spec
    N = spec.cells
    ds, dt_, k = diagonal_steps(spec, s), diagonal_steps(spec, t), spec.steps(h)
    if ds < 0 or dt_ < 0:
        raise ValueError("s and t must be positive multiples of delta")
    if max(ds, dt_) > 2 * N - 2:
        raise ValueError("diagonal outside the box")
    m = ds - dt_
    if abs(m) > k:
        raise ValueError("need |s - t| <= h")
    src = _section_intervals(A, dt_)
    count = src.size
    jmin = max(0, dt_ - N + 1)
    anchored = dt_ - jmin - np.arange(count)
    cell = SQRT2 * spec.delta
    len_a = cell * _dilated_section_count(src, m, ds, N)
    len_c = cell * _dilated_section_count(anchored, m, ds, N)
    margin = len_a - len_c
    tol = SLICE_SLACK_CELLS * cell
    return VerificationReport.build(
        "slice_growth",
        {"s": s, "t": t, "h": h, "delta": spec.delta},
        margin,
        tol,
        details={"length_A": len_a, "length_C": len_c},
    )
