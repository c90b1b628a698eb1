"""Discretized subsets of the truncated orthant ``[0, x_max]^n``.

A :class:`GridSet` is a union of closed grid cells.  Storage is windowed:
``block`` holds the occupancy of the cells in ``[origin, origin + shape)``
and every cell outside that window has the value ``fill``.  Default grids
(15360^2 cells in the plane) are far too large to keep densely, while the
sets studied here differ from a constant only on a small region.

Cell masses are exact: the cell ``prod [i_k d, (i_k + 1) d]`` carries
``prod (e^{-i_k d} - e^{-(i_k+1) d})``.  Dilations are cell-exact because
radii are restricted to multiples of the grid spacing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .analytic import AnalyticProfile

L1 = "L1"
T = "T"
_METRICS = (L1, T)
_MULTIPLE_TOL = 1e-9
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class GridSpec:
    """Regular grid of ``cells`` cells per axis over ``[0, x_max]^n``."""

    n: int
    delta: float
    x_max: float

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"grids support n = 2 or 3, got {self.n}")
        if not (self.delta > 0 and self.x_max > 0):
            raise ValueError("delta and x_max must be positive")
        ratio = self.x_max / self.delta
        if abs(ratio - round(ratio)) > _MULTIPLE_TOL * max(1.0, ratio) or round(ratio) < 8:
            raise ValueError(f"x_max/delta must be an integer >= 8, got {ratio}")

    @classmethod
    def default(cls, n: int) -> "GridSpec":
        if n == 2:
            return cls(2, 1 / 512, 30.0)
        if n == 3:
            return cls(3, 1 / 64, 20.0)
        raise ValueError(f"no default grid for n = {n}")

    @property
    def cells(self) -> int:
        return int(round(self.x_max / self.delta))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells,) * self.n

    @property
    def tail_bound(self) -> float:
        """Upper bound on the mass outside the box: the orthant is covered by
        the box plus ``{|x|_1 > x_max}``."""
        return AnalyticProfile.of(self.n).psi(self.x_max)

    def refined(self) -> "GridSpec":
        return GridSpec(self.n, self.delta / 2, self.x_max)

    def steps(self, h: float) -> int:
        """Number of cells in the radius ``h``; rejects radii off the grid."""
        k = h / self.delta
        if not h > 0 or abs(k - round(k)) > _MULTIPLE_TOL * max(1.0, k):
            raise ValueError(f"h={h} is not a positive multiple of delta={self.delta}")
        return int(round(k))

    def axis_weights(self, lo: int, hi: int) -> np.ndarray:
        i = np.arange(lo, hi, dtype=float)
        return np.exp(-i * self.delta) * -math.expm1(-self.delta)

    def interval_mass(self, lo: int, hi: int) -> float:
        return math.exp(-lo * self.delta) - math.exp(-hi * self.delta)

    def box_mass(self) -> float:
        return (-math.expm1(-self.cells * self.delta)) ** self.n


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    error_bound: float

    def __post_init__(self):
        if self.error_bound < 0:
            raise ValueError("error bound must be non-negative")

    @property
    def interval(self) -> tuple[float, float]:
        return max(self.value - self.error_bound, 0.0), self.value + self.error_bound


def _empty_block(n):
    return np.zeros((0,) * n, dtype=bool)


@dataclass(frozen=True, eq=False)
class GridSet:
    spec: GridSpec
    origin: tuple[int, ...]
    block: np.ndarray
    fill: bool = False
    includes_tail: bool = False
    _trimmed: bool = field(default=False, repr=False)

    def __post_init__(self):
        block = np.asarray(self.block, dtype=bool)
        if block.ndim != self.spec.n:
            raise ValueError("block dimension does not match grid")
        origin = tuple(int(o) for o in self.origin)
        N = self.spec.cells
        if block.size and any(o < 0 or o + s > N for o, s in zip(origin, block.shape)):
            raise ValueError("window exceeds the grid")
        if not self._trimmed:
            origin, block = _trim(origin, block, bool(self.fill))
        block = np.ascontiguousarray(block)
        block.setflags(write=False)
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "_trimmed", True)
        if self.includes_tail and not self._far_faces_full():
            raise ValueError("includes_tail requires every cell on the far faces to be occupied")

    # construction helpers -------------------------------------------------

    @classmethod
    def empty(cls, spec: GridSpec) -> "GridSet":
        return cls(spec, (0,) * spec.n, _empty_block(spec.n))

    @classmethod
    def full(cls, spec: GridSpec, includes_tail: bool = True) -> "GridSet":
        return cls(spec, (0,) * spec.n, _empty_block(spec.n), fill=True, includes_tail=includes_tail)

    @classmethod
    def from_dense(cls, spec: GridSpec, occupancy, includes_tail: bool = False) -> "GridSet":
        occ = np.asarray(occupancy, dtype=bool)
        if occ.shape != spec.shape:
            raise ValueError(f"occupancy shape {occ.shape} does not match grid {spec.shape}")
        fill = bool(includes_tail)
        return cls(spec, (0,) * spec.n, occ, fill=fill, includes_tail=includes_tail)

    # views ----------------------------------------------------------------

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def window(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        lo = self.origin
        return lo, tuple(o + s for o, s in zip(lo, self.block.shape))

    @property
    def occupancy(self) -> np.ndarray:
        """Dense occupancy over the whole grid.  Only sensible for small grids."""
        return self.values((0,) * self.n, self.spec.shape)

    def values(self, lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
        """Occupancy over the box ``[lo, hi)`` (clipped to nothing outside the grid)."""
        shape = tuple(max(h - l, 0) for l, h in zip(lo, hi))
        out = np.full(shape, self.fill, dtype=bool)
        if self.block.size == 0 or 0 in shape:
            return out
        blo, bhi = self.window
        src = []
        dst = []
        for l, h, bl, bh in zip(lo, hi, blo, bhi):
            a, b = max(l, bl), min(h, bh)
            if a >= b:
                return out
            src.append(slice(a - bl, b - bl))
            dst.append(slice(a - l, b - l))
        out[tuple(dst)] = self.block[tuple(src)]
        return out

    def __eq__(self, other):
        if not isinstance(other, GridSet):
            return NotImplemented
        return (self.spec == other.spec and self.fill == other.fill
                and self.includes_tail == other.includes_tail
                and self.origin == other.origin
                and self.block.shape == other.block.shape
                and bool(np.array_equal(self.block, other.block)))

    __hash__ = None

    def issubset(self, other: "GridSet") -> bool:
        _check_same_grid(self, other)
        if self.includes_tail and not other.includes_tail:
            return False
        if self.fill and not other.fill:
            return False
        lo, hi = _union_window([self, other])
        return bool(np.all(~self.values(lo, hi) | other.values(lo, hi)))

    def is_empty(self) -> bool:
        return not self.fill and not self.includes_tail and not self.block.any()

    def _far_faces_full(self) -> bool:
        N = self.spec.cells
        for axis in range(self.n):
            lo = [0] * self.n
            lo[axis] = N - 1
            if not self.values(lo, (N,) * self.n).all():
                return False
        return True

    def touches_far_faces(self) -> bool:
        if self.fill:
            return True
        if self.block.size == 0:
            return False
        _, hi = self.window
        return any(h >= self.spec.cells for h in hi)


def _trim(origin, block, fill):
    diff = block != fill
    if not diff.any():
        return (0,) * block.ndim, _empty_block(block.ndim)
    sl = []
    new_origin = []
    for axis in range(block.ndim):
        other = tuple(a for a in range(block.ndim) if a != axis)
        idx = np.flatnonzero(diff.any(axis=other))
        sl.append(slice(idx[0], idx[-1] + 1))
        new_origin.append(origin[axis] + int(idx[0]))
    return tuple(new_origin), block[tuple(sl)]


def _check_same_grid(*sets):
    spec = sets[0].spec
    for s in sets[1:]:
        if s.spec != spec:
            raise ValueError("grid specifications differ")


def _union_window(sets, pad=0):
    """Smallest box holding every window, padded and clipped to the grid."""
    n = sets[0].n
    N = sets[0].spec.cells
    los, his = [], []
    for s in sets:
        if s.block.size:
            lo, hi = s.window
            los.append(lo)
            his.append(hi)
    if not los:
        return (0,) * n, (0,) * n
    lo = tuple(max(min(c) - pad, 0) for c in zip(*los))
    hi = tuple(min(max(c) + pad, N) for c in zip(*his))
    return lo, hi


# constructors --------------------------------------------------------------

def from_ball_union(spec: GridSpec, centers, radii) -> GridSet:
    """Cells whose centre lies within l1 distance ``r_i`` of some ``c_i``."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if len(centers) == 0 or len(centers) != len(radii):
        raise ValueError("need equally many centers and radii, at least one")
    if centers.shape[1] != spec.n:
        raise ValueError("center dimension does not match grid")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if np.any(centers < 0) or np.any(centers > spec.x_max):
        raise ValueError("ball centers must lie inside the truncation box")
    d, N = spec.delta, spec.cells
    boxes = []
    for c, r in zip(centers, radii):
        lo = np.clip(np.ceil((c - r) / d - 0.5 - _MULTIPLE_TOL), 0, N).astype(int)
        hi = np.clip(np.floor((c + r) / d - 0.5 + _MULTIPLE_TOL) + 1, 0, N).astype(int)
        boxes.append((lo, hi))
    glo = np.min([b[0] for b in boxes], axis=0)
    ghi = np.max([b[1] for b in boxes], axis=0)
    block = np.zeros(tuple(np.maximum(ghi - glo, 0)), dtype=bool)
    for (lo, hi), c, r in zip(boxes, centers, radii):
        if np.any(hi <= lo):
            continue
        dist = None
        for axis in range(spec.n):
            coord = np.abs((np.arange(lo[axis], hi[axis]) + 0.5) * d - c[axis])
            shape = [1] * spec.n
            shape[axis] = -1
            coord = coord.reshape(shape)
            dist = coord if dist is None else dist + coord
        sl = tuple(slice(l - g, h - g) for l, h, g in zip(lo, hi, glo))
        block[sl] |= dist <= r * (1 + 1e-12) + _MULTIPLE_TOL * d
    return GridSet(spec, tuple(glo), block)


def simplex(spec: GridSpec, radius: float, complement: bool = False) -> GridSet:
    """Grid simplex ``{|x|_1 <= radius}`` or, with ``complement``, the cells outside it
    together with the tail beyond the box."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    d, N, n = spec.delta, spec.cells, spec.n
    # cell i lies in the simplex iff (sum i + n/2) d <= radius
    m = int(min(max(math.floor(radius / d - n / 2 + _MULTIPLE_TOL) + 1, 0), N))
    if m == 0:
        return GridSet.full(spec) if complement else GridSet.empty(spec)
    idx = np.arange(m)
    total = None
    for axis in range(n):
        shape = [1] * n
        shape[axis] = -1
        part = idx.reshape(shape)
        total = part if total is None else total + part
    inside = (total + n / 2) * d <= radius + _MULTIPLE_TOL * d
    if complement:
        return GridSet(spec, (0,) * n, ~inside, fill=True, includes_tail=True)
    return GridSet(spec, (0,) * n, inside)


def from_predicate(spec: GridSpec, pred: Callable[..., np.ndarray], includes_tail: bool = False) -> GridSet:
    """Cells whose centre satisfies ``pred``.

    ``pred`` receives one broadcastable coordinate array per axis (cell
    centres) and returns a boolean array.  The grid is scanned in slabs
    along the first axis, twice: once to locate the window, once to fill it.
    """
    d, N, n = spec.delta, spec.cells, spec.n
    centres = (np.arange(N) + 0.5) * d
    slab = max(1, _CHUNK_CELLS // N ** (n - 1))

    def evaluate(i0, i1):
        coords = []
        for axis in range(n):
            shape = [1] * n
            shape[axis] = -1
            c = centres[i0:i1] if axis == 0 else centres
            coords.append(c.reshape(shape))
        vals = np.asarray(pred(*coords), dtype=bool)
        return np.broadcast_to(vals, (i1 - i0,) + (N,) * (n - 1))

    lo_t, hi_t = [N] * n, [-1] * n
    lo_f, hi_f = [N] * n, [-1] * n
    for i0 in range(0, N, slab):
        i1 = min(i0 + slab, N)
        vals = evaluate(i0, i1)
        for target, lo, hi in ((vals, lo_t, hi_t), (~vals, lo_f, hi_f)):
            for axis in range(n):
                other = tuple(a for a in range(n) if a != axis)
                idx = np.flatnonzero(target.any(axis=other))
                if idx.size:
                    off = i0 if axis == 0 else 0
                    lo[axis] = min(lo[axis], int(idx[0]) + off)
                    hi[axis] = max(hi[axis], int(idx[-1]) + 1 + off)
    size_t = math.prod(max(h - l, 0) for l, h in zip(lo_t, hi_t))
    size_f = math.prod(max(h - l, 0) for l, h in zip(lo_f, hi_f))
    fill = size_f < size_t or (size_f == size_t and includes_tail)
    lo, hi = (lo_f, hi_f) if fill else (lo_t, hi_t)
    if any(h <= l for l, h in zip(lo, hi)):
        return GridSet(spec, (0,) * n, _empty_block(n), fill=fill, includes_tail=includes_tail)
    block = np.empty(tuple(h - l for l, h in zip(lo, hi)), dtype=bool)
    for i0 in range(lo[0], hi[0], slab):
        i1 = min(i0 + slab, hi[0])
        vals = evaluate(i0, i1)
        block[i0 - lo[0]:i1 - lo[0]] = vals[(slice(None),) + tuple(slice(l, h) for l, h in zip(lo[1:], hi[1:]))]
    return GridSet(spec, tuple(lo), block, fill=fill, includes_tail=includes_tail)


# measure -------------------------------------------------------------------

def _masked_mass(spec, lo, occ):
    if occ.size == 0:
        return 0.0
    ws = [spec.axis_weights(l, l + s) for l, s in zip(lo, occ.shape)]
    hist = kernels.mass_histogram(occ.view(np.uint8), ws, 2)
    return float(hist[1])


def _window_mass(spec, lo, hi):
    return math.prod(spec.interval_mass(l, h) for l, h in zip(lo, hi))


def _occupied_mass(A: GridSet) -> float:
    """Exact mass of the occupied cells inside the box (tail excluded)."""
    spec = A.spec
    inside = _masked_mass(spec, A.origin, A.block)
    if not A.fill:
        return inside
    lo, hi = A.window
    outside = spec.box_mass() - (_window_mass(spec, lo, hi) if A.block.size else 0.0)
    return inside + outside


def perimeter_mass(A: GridSet) -> float:
    """Total mass of cells with an axis neighbour (inside the grid) of the other state."""
    if A.block.size == 0:
        return 0.0
    lo, hi = _union_window([A], pad=1)
    vals = A.values(lo, hi)
    edge = np.zeros_like(vals)
    for axis in range(A.n):
        a = [slice(None)] * A.n
        b = [slice(None)] * A.n
        a[axis] = slice(1, None)
        b[axis] = slice(None, -1)
        diff = vals[tuple(a)] != vals[tuple(b)]
        edge[tuple(a)] |= diff
        edge[tuple(b)] |= diff
    return _masked_mass(A.spec, lo, edge)


def measure(A: GridSet) -> MeasureEstimate:
    """Exact mass of the cell union plus a bound on its distance to the set it discretizes.

    The bound is the mass of all perimeter cells (cells next to a cell of the
    other state), plus the tail bound when a tail-free set reaches the far
    faces of the box and might continue beyond them.
    """
    spec = A.spec
    value = _occupied_mass(A)
    if A.includes_tail:
        value += 1.0 - spec.box_mass()
    err = perimeter_mass(A)
    if not A.includes_tail and A.touches_far_faces():
        err += spec.tail_bound
    return MeasureEstimate(min(max(value, 0.0), 1.0), err)


# distance fields and dilation ------------------------------------------------

def _distance_buffer(A: GridSet, lo, hi, cap):
    dtype = np.uint8 if cap <= 254 else np.int32
    vals = A.values(lo, hi)
    dist = np.where(vals, 0, cap).astype(dtype)
    N = A.spec.cells
    low_src = [l > 0 and A.fill for l in lo]
    high_src = [(A.fill if h < N else A.includes_tail) for h in hi]
    return dist, low_src, high_src


def _sweep(dist, low_src, high_src, cap, metric, directions=("fwd", "bwd")):
    for axis in range(dist.ndim):
        if "fwd" in directions:
            kernels.axis_pass(dist, axis, True, low_src[axis], cap)
        if "bwd" in directions:
            kernels.axis_pass(dist, axis, False, high_src[axis], cap)
    return dist


def _cone_distance(A: GridSet, lo, hi, cap):
    """Distance to ``A`` along offsets with both coordinates >= 0 or both <= 0."""
    if A.n != 2:
        raise ValueError("T-dilation is defined in the plane only")
    plus, low_src, high_src = _distance_buffer(A, lo, hi, cap)
    minus = plus.copy()
    _sweep(plus, low_src, high_src, cap, T, ("fwd",))
    _sweep(minus, low_src, high_src, cap, T, ("bwd",))
    np.minimum(plus, minus, out=plus)
    return plus


def _distance_window(A: GridSet, reach: int, metric: str):
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    cap = reach + 1
    lo, hi = _union_window([A], pad=cap)
    if A.block.size == 0:
        return lo, hi, None
    if metric == L1:
        dist, low_src, high_src = _distance_buffer(A, lo, hi, cap)
        _sweep(dist, low_src, high_src, cap, L1)
    else:
        dist = _cone_distance(A, lo, hi, cap)
    return lo, hi, dist


def l1_distance_field(A: GridSet) -> np.ndarray:
    """Exact l1 distance (in length units) from every cell centre to the nearest occupied cell."""
    if A.is_empty():
        raise ValueError("distance to an empty set is undefined")
    N = A.spec.cells
    cap = A.n * N + 1
    lo, hi = (0,) * A.n, A.spec.shape
    dist, low_src, high_src = _distance_buffer(A, lo, hi, cap)
    _sweep(dist, low_src, high_src, cap, L1)
    return dist.astype(float) * A.spec.delta


def dilate(A: GridSet, h: float, metric: str = L1) -> GridSet:
    k = A.spec.steps(h)
    return dilate_steps(A, k, metric)


def dilate_steps(A: GridSet, k: int, metric: str = L1) -> GridSet:
    if k < 0:
        raise ValueError("dilation steps must be non-negative")
    if k == 0:
        return A
    lo, hi, dist = _distance_window(A, k, metric)
    if dist is None:
        return A
    return GridSet(A.spec, lo, dist <= k, fill=A.fill, includes_tail=A.includes_tail)


def dilate_l1(A: GridSet, h: float) -> GridSet:
    return dilate(A, h, L1)


def dilate_T(A: GridSet, h: float) -> GridSet:
    if A.n != 2:
        raise ValueError("T-dilation is defined in the plane only")
    return dilate(A, h, T)


def dilation_masses(A: GridSet, steps: Sequence[int], metric: str = L1) -> np.ndarray:
    """Exact in-box-plus-tail mass of ``dilate_steps(A, k)`` for every ``k`` in ``steps``,
    from a single distance sweep."""
    steps = np.asarray(steps, dtype=int)
    base = _occupied_mass(A) + ((1.0 - A.spec.box_mass()) if A.includes_tail else 0.0)
    if steps.size == 0:
        return np.zeros(0)
    reach = int(steps.max())
    lo, hi, dist = _distance_window(A, reach, metric)
    if dist is None:
        return np.full(steps.shape, base)
    spec = A.spec
    ws = [spec.axis_weights(l, h) for l, h in zip(lo, hi)]
    hist = kernels.mass_histogram(dist, ws, reach + 1)
    cum = np.cumsum(hist)
    outside = 0.0
    if A.fill:
        outside = spec.box_mass() - _window_mass(spec, lo, hi)
    tail = (1.0 - spec.box_mass()) if A.includes_tail else 0.0
    return np.minimum(cum[steps] + outside + tail, 1.0)


def boundary_estimate(A: GridSet, metric: str = L1, steps=(2, 4, 8)) -> tuple[float, float]:
    """Extrapolated growth rate ``lim (mu(A^h) - mu(A)) / h`` and an error bound.

    Difference quotients at ``h = k delta`` are extrapolated to ``h = 0`` by
    the quadratic through the three points.  The bound adds their spread to
    the O(delta) shift of a staircase boundary, ``n delta (|R| + 1)``.
    """
    steps = tuple(int(k) for k in steps)
    if len(steps) != 3:
        raise ValueError("need three step counts")
    delta = A.spec.delta
    masses = dilation_masses(A, (0,) + steps, metric)
    hs = np.array(steps, dtype=float) * delta
    quotients = (masses[1:] - masses[0]) / hs
    weights = np.array([
        np.prod([-hs[j] / (hs[i] - hs[j]) for j in range(3) if j != i]) for i in range(3)
    ])
    value = float(weights @ quotients)
    spread = float(np.max(np.abs(quotients - value)))
    return value, spread + A.n * delta * (abs(value) + 1.0)


# set algebra -----------------------------------------------------------------

def union(A: GridSet, B: GridSet) -> GridSet:
    _check_same_grid(A, B)
    fill = A.fill or B.fill
    lo, hi = _union_window([A, B])
    block = A.values(lo, hi) | B.values(lo, hi)
    return GridSet(A.spec, lo, block, fill=fill, includes_tail=A.includes_tail or B.includes_tail)


def intersection(A: GridSet, B: GridSet) -> GridSet:
    _check_same_grid(A, B)
    lo, hi = _union_window([A, B])
    block = A.values(lo, hi) & B.values(lo, hi)
    return GridSet(A.spec, lo, block, fill=A.fill and B.fill,
                   includes_tail=A.includes_tail and B.includes_tail)


def complement(A: GridSet) -> GridSet:
    """Cells (and tail) not in ``A``.

    A tail-free set occupying part of a far face has no representable
    complement: the complement would contain the tail but not the whole face.
    """
    if not A.includes_tail and A.touches_far_faces():
        raise ValueError("complement undefined: the set reaches a far face but excludes the tail")
    return GridSet(A.spec, A.origin, ~A.block, fill=not A.fill, includes_tail=not A.includes_tail)


def connected_components(A: GridSet) -> list[GridSet]:
    """Components under 2n-neighbour adjacency, largest measure first.

    Cells beyond the window are one piece when ``fill`` is set; the tail
    joins every component that reaches a far face.
    """
    from scipy import ndimage

    if A.is_empty():
        return []
    spec, N = A.spec, A.spec.cells
    lo, hi = _union_window([A], pad=1) if A.block.size else ((0,) * A.n, (0,) * A.n)
    vals = A.values(lo, hi)
    labels, count = ndimage.label(vals)
    groups: dict[int, list[int]] = {lab: [lab] for lab in range(1, count + 1)}
    outer: set[int] = set()
    if A.fill:
        # cells on the padded rim (inside the grid) belong to the exterior piece
        for axis in range(A.n):
            for side, edge in ((0, lo[axis]), (-1, hi[axis])):
                at_grid_edge = edge == 0 if side == 0 else edge == N
                if at_grid_edge:
                    continue
                sl = [slice(None)] * A.n
                sl[axis] = side
                outer.update(int(v) for v in np.unique(labels[tuple(sl)]) if v)
    tail: set[int] = set()
    if A.includes_tail:
        for axis in range(A.n):
            if hi[axis] == N:
                sl = [slice(None)] * A.n
                sl[axis] = -1
                tail.update(int(v) for v in np.unique(labels[tuple(sl)]) if v)
    exterior = outer | tail
    pieces = []
    if A.fill or A.includes_tail:
        members = sorted(exterior)
        mask = np.isin(labels, members) if members else np.zeros_like(vals)
        if A.fill or members:
            pieces.append(GridSet(spec, lo, mask, fill=A.fill, includes_tail=A.includes_tail))
    for lab in range(1, count + 1):
        if lab in exterior:
            continue
        pieces.append(GridSet(spec, lo, labels == lab))
    pieces.sort(key=lambda s: -measure(s).value)
    return pieces


def shift(A: GridSet, offset: Sequence[int]) -> GridSet:
    """Translate a tail-free set by whole cells; cells pushed off the grid are dropped."""
    if A.fill or A.includes_tail:
        raise ValueError("only bounded sets can be shifted")
    if A.block.size == 0:
        return A
    N = A.spec.cells
    lo, hi = A.window
    new_lo = [l + o for l, o in zip(lo, offset)]
    src, org = [], []
    for l, h, o in zip(new_lo, (h + o for h, o in zip(hi, offset)), lo):
        a, b = max(l, 0), min(h, N)
        if a >= b:
            return GridSet.empty(A.spec)
        src.append(slice(a - l, b - l))
        org.append(a)
    return GridSet(A.spec, tuple(org), A.block[tuple(src)])
