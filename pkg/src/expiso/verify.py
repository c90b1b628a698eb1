"""Executable checks of the isoperimetric inequalities, with margins and verdicts.

Every check reports a ``margin`` (positive means the inequality holds) and
a ``tolerance``.  Grid checks bracket the continuous quantity they test:
``margin`` is computed from the pessimistic end of the bracket and
``margin_upper`` from the optimistic end.  The verdict is

* ``pass`` when ``margin >= -tolerance``,
* ``inconclusive`` when only ``margin_upper >= -tolerance``,
* ``fail`` otherwise.

Grid sets are treated as the union of their closed cells (plus the region
beyond the box when ``includes_tail`` is set).  The mass of such a set is
exact; its continuous ``l1`` neighbourhood of radius ``k delta`` lies between
the grid dilations by ``k`` and ``k + n - 1`` steps (``k`` and ``k + 1`` for
the cone ``T``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import grid as g
from .analytic import AnalyticProfile, poisson_cdf, poisson_median
from .extremal import extremal_growth, extremal_radius, isoperimetric_profile
from .profile import _grid_counts, symmetrize

PASS, INCONCLUSIVE, FAIL = "pass", "inconclusive", "fail"
GRID_TOLERANCE = 1e-10
ANALYTIC_TOLERANCE = 1e-9
DEFAULT_L = 2.0
DEGENERACY_FACTOR = 10.0
COUNTEREXAMPLE_GAP = 1e-4
MAX_WITNESSES = 10


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


@dataclass
class VerificationReport:
    check_name: str
    parameters: dict
    margin: float
    tolerance: float
    verdict: str
    witnesses: list = field(default_factory=list)
    margin_upper: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @classmethod
    def build(cls, name, parameters, margin, tolerance, margin_upper=None, witnesses=(), details=None):
        margin = float(margin)
        if margin >= -tolerance:
            verdict = PASS
        elif margin_upper is not None and margin_upper >= -tolerance:
            verdict = INCONCLUSIVE
        else:
            verdict = FAIL
        ws = sorted(witnesses, key=lambda w: w["margin"])[:MAX_WITNESSES]
        return cls(name, dict(parameters), margin, float(tolerance), verdict, ws,
                   None if margin_upper is None else float(margin_upper), dict(details or {}))

    def to_dict(self) -> dict:
        out = {
            "check_name": self.check_name,
            "parameters": self.parameters,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
        }
        if self.margin_upper is not None:
            out["margin_upper"] = self.margin_upper
        if self.details:
            out["details"] = self.details
        return _jsonable(out)


@dataclass(frozen=True)
class ReductionWitness:
    u: float
    a: float
    b: float
    h0: float
    R_lambda_mass: float


def _grid_params(spec: g.GridSpec) -> dict:
    return {"n": spec.n, "delta": spec.delta, "x_max": spec.x_max}


def _check_nondegenerate(A: g.GridSet):
    est = g.measure(A)
    if est.value >= 1.0 or est.value < DEGENERACY_FACTOR * est.error_bound:
        raise ValueError(
            f"degenerate set: measure {est.value:.3g} with discretization error {est.error_bound:.3g}"
        )
    return est


def _neighbourhood_bracket(A: g.GridSet, steps: Sequence[int], metric: str = g.L1):
    """Lower and upper bounds on the measure of the continuous neighbourhoods."""
    extra = 1 if metric == g.T else A.n - 1
    steps = np.asarray(steps, dtype=int)
    both = np.concatenate((steps, steps + extra))
    masses = g.dilation_masses(A, both, metric)
    lower, upper = masses[:steps.size], masses[steps.size:].copy()
    if not A.includes_tail:
        N = A.spec.cells
        _, hi = A.window
        for idx, k in enumerate(steps + extra):
            if A.fill or (A.block.size and any(h + k >= N for h in hi)):
                upper[idx] += A.spec.tail_bound
    return lower, np.minimum(upper, 1.0)


def verify_isoperimetry(A: g.GridSet, h_ladder: Iterable[float], L: float = DEFAULT_L,
                        tolerance: float = GRID_TOLERANCE) -> VerificationReport:
    """Neighbourhood form of the isoperimetric inequality with an ``L h^2`` allowance.

    The reference is the least neighbourhood measure allowed by the
    isoperimetric profile (see :func:`extremal_growth`).  The smallest ``L``
    that would make every ladder entry pass is recorded; values above ``L``
    are flagged as anomalies.
    """
    spec = A.spec
    hs = np.asarray(sorted(set(float(h) for h in h_ladder)), dtype=float)
    if hs.size == 0:
        raise ValueError("empty h ladder")
    steps = [spec.steps(h) for h in hs]
    est = _check_nondegenerate(A)
    p = est.value
    lower, upper = _neighbourhood_bracket(A, steps)
    reference = np.atleast_1d(extremal_growth(A.n, p, hs))
    slack = L * hs ** 2
    lo_m = lower - reference + slack
    up_m = upper - reference + slack
    L_needed = float(np.max(np.maximum(reference - lower, 0.0) / hs ** 2))
    radius, is_simplex = extremal_radius(A.n, p)
    witnesses = [
        {"h": float(h), "margin": float(a), "margin_upper": float(b), "lower": float(lo),
         "upper": float(up), "reference": float(r)}
        for h, a, b, lo, up, r in zip(hs, lo_m, up_m, lower, upper, reference)
    ]
    return VerificationReport.build(
        "isoperimetry",
        {**_grid_params(spec), "h_ladder": hs.tolist(), "L": L},
        float(np.min(lo_m)),
        tolerance,
        margin_upper=float(np.min(up_m)),
        witnesses=witnesses,
        details={
            "measure": p,
            "measure_error": est.error_bound,
            "comparison_kind": "simplex" if bool(is_simplex) else "complement",
            "comparison_radius": float(radius),
            "L_needed": L_needed,
            "anomaly": L_needed > L,
        },
    )


def verify_neighborhood_form(B: g.GridSet, h: float, tolerance: float = GRID_TOLERANCE) -> VerificationReport:
    """Radius growth of a neighbourhood.

    Above the median: ``phi^-1(nu(B^h)) - phi^-1(nu(B)) - h``; below it,
    when ``nu(B^h) < 1/2``: ``psi^-1(nu(B)) - h - psi^-1(nu(B^h))``.
    Margins are in radius units.
    """
    spec = B.spec
    k = spec.steps(h)
    est = _check_nondegenerate(B)
    prof = AnalyticProfile.of(B.n)
    p = est.value
    lower, upper = (float(x[0]) for x in _neighbourhood_bracket(B, [k]))
    if p >= 0.5:
        form = 1
        base = prof.radius_for_masses(p, 1.0 - p)

        def radius_of(m):
            return math.inf if m >= 1.0 else prof.radius_for_masses(m, 1.0 - m)

        margin = radius_of(lower) - base - h
        margin_up = radius_of(upper) - base - h
    else:
        if upper >= 0.5:
            raise ValueError("second form needs nu(B^h) < 1/2")
        form = 2
        base = prof.psi_inv(p)
        margin = base - h - prof.psi_inv(lower)
        margin_up = base - h - prof.psi_inv(upper)
    return VerificationReport.build(
        "neighborhood_form",
        {**_grid_params(spec), "h": h, "form": form},
        margin,
        tolerance,
        margin_upper=margin_up,
        details={"measure": p, "dilated_lower": lower, "dilated_upper": upper},
    )


def trapezoid_grid(count: int = 200, lo: float = 1e-3, hi: float = 60.0):
    """Default sweep: ``a`` in ``{0}`` plus log-spaced values, ``b`` log-spaced plus ``inf``."""
    ticks = np.geomspace(lo, hi, count - 1)
    return np.concatenate(([0.0], ticks)), np.concatenate((ticks, [math.inf]))


def verify_trapezoid_lemma(n: int, a_grid=None, b_grid=None,
                           tolerance: float = ANALYTIC_TOLERANCE) -> VerificationReport:
    """Boundary of every shell ``{a < |x|_1 < b}`` against the profile at its measure."""
    if a_grid is None or b_grid is None:
        da, db = trapezoid_grid()
        a_grid = da if a_grid is None else a_grid
        b_grid = db if b_grid is None else b_grid
    a, b = np.meshgrid(np.asarray(a_grid, dtype=float), np.asarray(b_grid, dtype=float), indexing="ij")
    keep = a < b
    a, b = a[keep], b[keep]
    if a.size == 0:
        raise ValueError("no pair with a < b")
    prof = AnalyticProfile.of(n)
    lo_a, up_a = prof.phi_psi(a)
    lo_b, up_b = prof.phi_psi(b)
    inside = np.where(lo_b > 0.5, up_a - up_b, lo_b - lo_a)
    outside = lo_a + up_b
    usable = (inside > 0) & (outside > 0)
    a, b, inside, outside = a[usable], b[usable], inside[usable], outside[usable]
    boundary = np.where(a > 0, prof.ball_boundary(a), 0.0) + np.where(np.isfinite(b), prof.ball_boundary(np.where(np.isfinite(b), b, 0.0)), 0.0)
    comparison = isoperimetric_profile(n, inside, complement_mass=outside)
    margin = boundary - comparison
    # shells that are their own comparison set
    own = ((a == 0) & (inside >= 0.5)) | (np.isinf(b) & (inside < 0.5))
    margin = np.where(own, 0.0, margin)
    order = np.argsort(margin, kind="stable")[:MAX_WITNESSES]
    witnesses = [
        {"a": float(a[i]), "b": float(b[i]), "measure": float(inside[i]),
         "boundary": float(boundary[i]), "comparison": float(comparison[i]), "margin": float(margin[i])}
        for i in order
    ]
    return VerificationReport.build(
        "trapezoid_lemma",
        {"n": n, "pairs": int(margin.size), "skipped": int((~usable).sum())},
        float(margin.min()),
        tolerance,
        witnesses=witnesses,
    )


def sample_component_pairs(n: int, per_case: int, seed: int = 0):
    """Random ``(x, y, case)`` radius pairs satisfying each case's measure conditions.

    Case 1: both comparison sets are simplex complements and so is their union.
    Case 2: both are complements, the union reaches the median.
    Case 3: ``x`` is a complement radius, ``y`` a simplex radius.
    """
    rng = np.random.default_rng([seed, n])
    prof = AnalyticProfile.of(n)
    out = []
    # Case 1: tail masses with sum < 1/2, spread over many decades
    p1 = 0.5 * rng.uniform(size=per_case) * 10.0 ** -rng.uniform(0, 8, size=per_case)
    share = rng.uniform(size=per_case)
    px, py = p1 * share, p1 * (1 - share)
    for x, y in zip(prof.psi_inv(np.maximum(px, 1e-300)), prof.psi_inv(np.maximum(py, 1e-300))):
        out.append((float(x), float(y), 1))
    # Case 2: each below 1/2, sum at least 1/2
    px = rng.uniform(0.25, 0.5, size=per_case) * (1 - 1e-9)
    py = np.minimum(rng.uniform(0.5 - px, 0.5), 0.5 * (1 - 1e-9))
    for x, y in zip(prof.psi_inv(px), prof.psi_inv(py)):
        out.append((float(x), float(y), 2))
    # Case 3: complement below 1/2, simplex at least 1/2, union below 1
    qy = rng.uniform(1e-6, 0.5, size=per_case)
    px = qy * rng.uniform(0.0, 1.0, size=per_case) * (1 - 1e-9)
    px = np.maximum(px, 1e-300)
    ys = prof.radius_for_masses(1 - qy, qy)
    for x, y in zip(prof.psi_inv(px), ys):
        out.append((float(x), float(y), 3))
    return out


def verify_component_lemma(n: int, samples, tolerance: float = ANALYTIC_TOLERANCE) -> VerificationReport:
    """Superadditivity of the profile over disjoint components.

    Each sample is ``(x, y, case)`` with ``x``, ``y`` the radii of the two
    comparison sets; ``y = inf`` stands for an empty second set.
    """
    prof = AnalyticProfile.of(n)
    rows = list(samples)
    if not rows:
        raise ValueError("no samples")
    x = np.array([r[0] for r in rows], dtype=float)
    y = np.array([r[1] for r in rows], dtype=float)
    case = np.array([int(r[2]) for r in rows])
    if np.any(~np.isin(case, (1, 2, 3))):
        raise ValueError("case tags must be 1, 2 or 3")
    lo_x, up_x = prof.phi_psi(x)
    lo_y, up_y = prof.phi_psi(y)
    z = np.empty_like(x)
    for c in (1, 2, 3):
        m = case == c
        if not m.any():
            continue
        if c in (1, 2):
            total = up_x[m] + up_y[m]
            ok = (up_x[m] < 0.5) & (up_y[m] < 0.5) & ((total < 0.5) if c == 1 else (total >= 0.5))
        else:
            total = up_x[m] + lo_y[m]
            rest = up_y[m] - up_x[m]
            ok = (up_x[m] < 0.5) & (lo_y[m] >= 0.5) & (rest > 0)
        if not ok.all():
            bad = np.flatnonzero(m)[np.flatnonzero(~ok)[0]]
            raise ValueError(f"sample {bad} violates the case {c} conditions")
        if c == 1:
            z[m] = prof.psi_inv(total)
        elif c == 2:
            z[m] = prof.radius_for_masses(total, 1.0 - total)
        else:
            z[m] = prof.radius_for_masses(total, rest)
    margin = prof.ball_boundary(x) + prof.ball_boundary(y) - prof.ball_boundary(z)
    order = np.argsort(margin, kind="stable")[:MAX_WITNESSES]
    witnesses = [{"x": float(x[i]), "y": float(y[i]), "z": float(z[i]), "case": int(case[i]),
                  "margin": float(margin[i])} for i in order]
    counts = {f"case_{c}": int((case == c).sum()) for c in (1, 2, 3)}
    return VerificationReport.build(
        "component_lemma", {"n": n, "samples": len(rows), **counts}, float(margin.min()), tolerance,
        witnesses=witnesses,
    )


def verify_poisson_median(k_max: int = 200, tolerance: float = ANALYTIC_TOLERANCE) -> VerificationReport:
    """``P(Poisson(k) <= k) >= 1/2`` and ``k - log 2 <= l(k) < k + 1/3`` for ``k = 1..k_max``."""
    if not 1 <= k_max <= 200:
        raise ValueError("k_max must lie in 1..200")
    witnesses = []
    worst = math.inf
    for k in range(1, k_max + 1):
        cdf = poisson_cdf(k, float(k))
        l = poisson_median(float(k))
        above_half = cdf - 0.5
        low_gap = l - (k - math.log(2))
        high_gap = (k + 1.0 / 3.0) - l
        m = min(above_half, low_gap, high_gap)
        worst = min(worst, m)
        witnesses.append({"k": k, "cdf": cdf, "median": l, "margin": m, "strict_upper": high_gap > 0})
    return VerificationReport.build(
        "poisson_median", {"k_max": k_max}, worst, tolerance, witnesses=witnesses,
        details={"cdf_at_k_max": witnesses[-1]["cdf"]},
    )


def counterexample_check() -> VerificationReport:
    """The half-plane ``{x + y <= 3}`` under the symmetric exponential measure on the plane.

    ``x + y`` has density ``(1 + |s|) e^{-|s|} / 4``, so the half-plane has
    measure ``1 - 5 e^{-3} / 4`` and boundary measure ``e^{-3}``.  The ``l1``
    ball of the same measure (``|x| + |y|`` is Gamma(2)-distributed) has
    radius ``r`` with ``(1 + r) e^{-r} = 5 e^{-3} / 4`` and boundary ``r e^{-r}``.
    The check passes when the half-plane's boundary is smaller by at least
    ``1e-4``.
    """
    tail = 1.25 * math.exp(-3.0)
    half_plane_measure = 1.0 - tail
    half_plane_boundary = math.exp(-3.0)
    r = AnalyticProfile.of(2).psi_inv(tail)
    ball_boundary = r * math.exp(-r)
    margin = ball_boundary - half_plane_boundary
    return VerificationReport.build(
        "counterexample",
        {"set": "x+y<=3", "density": "exp(-|x|-|y|)/4"},
        margin,
        -COUNTEREXAMPLE_GAP,
        details={
            "half_plane_measure": half_plane_measure,
            "half_plane_boundary": half_plane_boundary,
            "ball_radius": r,
            "ball_boundary": ball_boundary,
            "strict": margin > COUNTEREXAMPLE_GAP,
        },
    )


def verify_symmetrisation(A: g.GridSet, h_ladder: Iterable[float],
                          tolerance: float = GRID_TOLERANCE) -> VerificationReport:
    """Measure preservation and ``hT``-growth contraction of the anchored rearrangement.

    Both margins compare grid quantities of the same discretization; the
    combined measure error bounds of the two sets form the band in which the
    outcome is reported as inconclusive.
    """
    if A.n != 2:
        raise ValueError("symmetrisation is defined in the plane only")
    spec = A.spec
    hs = np.asarray(sorted(set(float(h) for h in h_ladder)), dtype=float)
    steps = [spec.steps(h) for h in hs]
    C = symmetrize(A)
    ea, ec = g.measure(A), g.measure(C)
    band = ea.error_bound + ec.error_bound
    measure_margin = band - abs(ec.value - ea.value)
    grow_a = g.dilation_masses(A, steps, g.T)
    grow_c = g.dilation_masses(C, steps, g.T)
    growth = grow_a - grow_c
    growth_margin = float(np.min(growth)) if growth.size else math.inf
    witnesses = [{"h": float(h), "margin": float(m), "A": float(x), "C": float(y)}
                 for h, m, x, y in zip(hs, growth, grow_a, grow_c)]
    margin = min(measure_margin, growth_margin)
    return VerificationReport.build(
        "symmetrisation",
        {**_grid_params(spec), "h_ladder": hs.tolist()},
        margin,
        tolerance,
        margin_upper=min(measure_margin, growth_margin + band),
        witnesses=witnesses,
        details={
            "measure_A": ea.value, "measure_C": ec.value, "error_band": band,
            "measure_margin": measure_margin, "growth_margin": growth_margin,
        },
    )


def _diagonal_cell_mass(spec, d):
    return np.exp(-np.asarray(d, dtype=float) * spec.delta) * math.expm1(-spec.delta) ** 2


def _first_violation(spec, counts, d_star, budget):
    """Largest ``lambda = m delta`` with ``nu_1(R_lambda') <= budget`` for every ``lambda' <= lambda``.

    ``R_lambda`` collects the samples ``t_d`` below ``u`` with ``t_d > lambda``
    and ``t_d - f(t_d)/sqrt 2 < lambda``; each carries the exponential mass of
    ``[t_d - delta/2, t_d + delta/2]``.  The masses for all ``m`` come from a
    difference array: sample ``d`` belongs to ``R_{m delta}`` for
    ``missing_d < m <= d``.
    """
    d = np.arange(d_star)
    delta = spec.delta
    missing = d + 1 - counts[:d_star]
    t = (d + 1) * delta
    w = np.exp(-(t - delta / 2)) * -math.expm1(-delta)
    size = d_star + 2
    diff = np.zeros(size + 1)
    start = missing + 1
    stop = d + 1
    ok = start < stop
    np.add.at(diff, start[ok], w[ok])
    np.add.at(diff, stop[ok], -w[ok])
    mass = np.cumsum(diff)[:size]
    over = np.flatnonzero(mass[1:] > budget * (1 + 1e-12))
    if over.size == 0:
        return math.inf, mass
    first = over[0] + 1
    return (first - 1) * delta, mass


def verify_reduction(A: g.GridSet, h_ladder: Iterable[float] | None = None, L: float = DEFAULT_L,
                     tolerance: float = GRID_TOLERANCE):
    """Trapezoid comparison below and above the first full section of the rearranged set.

    Returns ``(witness, report)``; the witness is ``None`` when no diagonal
    section is full, in which case the shift argument ``nu(C - h e_1) = nu(C) e^h``
    is checked against the growth of the complement comparison set.
    """
    if A.n != 2:
        raise ValueError("the reduction argument is planar")
    if A.fill or A.includes_tail:
        raise ValueError("the reduction argument needs a bounded set")
    if len(g.connected_components(A)) != 1:
        raise ValueError("set is not connected")
    spec = A.spec
    delta = spec.delta
    hs = np.asarray(sorted(set(float(h) for h in (h_ladder or [2 * delta, 4 * delta, 8 * delta]))))
    steps = np.array([spec.steps(h) for h in hs])
    C = symmetrize(A)
    counts = _grid_counts(C)
    N = spec.cells
    d_idx = np.arange(N)
    full = np.flatnonzero(counts[:N] == d_idx + 1)
    prof = AnalyticProfile.of(2)
    mu = g.measure(C)
    params = {**_grid_params(spec), "h_ladder": hs.tolist(), "L": L}
    if full.size == 0:
        return None, _no_full_section(C, mu, hs, steps, params, tolerance)
    d_star = int(full[0])
    u = (d_star + 1) * delta
    w = _diagonal_cell_mass(spec, np.arange(counts.size))
    stair = float(np.sum((np.arange(d_star + 1) + 1) * w[:d_star + 1]))
    below = float(np.sum(counts[:d_star + 1] * w[:d_star + 1]))
    above = float(np.sum(counts[d_star + 1:] * w[d_star + 1:]))
    pa = stair - below
    a = 0.0 if pa <= 0 else float(prof.radius_for_masses(pa, 1.0 - pa))
    pb = stair + above
    b = float(prof.radius_for_masses(pb, 1.0 - pb))
    occupied = np.flatnonzero(counts > 0)
    h1 = max(int(occupied[0]) - 1, 0) * delta
    budget = math.exp(-a) - math.exp(-u)
    lam, r_mass = _first_violation(spec, counts, d_star, budget)
    h0 = min(lam, h1)
    r_at_h0 = float(r_mass[min(int(round(h0 / delta)), r_mass.size - 1)]) if math.isfinite(h0) else 0.0
    witness = ReductionWitness(u=u, a=a, b=b, h0=h0, R_lambda_mass=r_at_h0)

    witnesses = []
    # below u: C together with everything beyond the staircase
    usable = hs < min(h0, a)
    if usable.any():
        E = g.union(C, g.simplex(spec, u, complement=True))
        ks = steps[usable]
        lower = g.dilation_masses(E, ks, g.T)
        upper = g.dilation_masses(E, ks + 1, g.T)
        ref = prof.psi(a - hs[usable])
        for h, lo, up, r in zip(hs[usable], lower, upper, ref):
            witnesses.append({"inequality": "below", "h": float(h), "margin": float(lo - r),
                              "margin_upper": float(up - r), "lower": float(lo), "reference": float(r)})
    # above u: C together with the staircase
    E2 = g.union(C, g.simplex(spec, u))
    lower = g.dilation_masses(E2, steps, g.T)
    upper = g.dilation_masses(E2, steps + 1, g.T)
    ref = prof.phi(b + hs) - L * hs ** 2
    for h, lo, up, r in zip(hs, lower, upper, ref):
        witnesses.append({"inequality": "above", "h": float(h), "margin": float(lo - r),
                          "margin_upper": float(up - r), "lower": float(lo), "reference": float(r)})
    margin = min(wi["margin"] for wi in witnesses)
    margin_up = min(wi["margin_upper"] for wi in witnesses)
    report = VerificationReport.build(
        "reduction", params, margin, tolerance, margin_upper=margin_up, witnesses=witnesses,
        details={"branch": "full_section", "u": u, "a": a, "b": b, "h0": h0, "h1": h1,
                 "R_lambda_mass": r_at_h0, "interval_mass": budget, "measure": mu.value,
                 "staircase_mass": stair, "below_checked": int(usable.sum())},
    )
    return witness, report


def _no_full_section(C, mu, hs, steps, params, tolerance):
    spec = C.spec
    prof = AnalyticProfile.of(2)
    gap = C.origin[0]
    r = float(prof.psi_inv(mu.value))
    witnesses = []
    for h, k in zip(hs, steps):
        if k > gap:
            continue
        shifted = g.measure(g.shift(C, (-int(k), 0))).value
        ref = prof.psi(max(r - h, 0.0))
        witnesses.append({"h": float(h), "margin": shifted - ref, "shifted": shifted,
                          "scaled": mu.value * math.exp(h), "reference": ref})
    if not witnesses:
        raise ValueError("no ladder step fits between the set and the vertical axis")
    margin = min(wi["margin"] for wi in witnesses)
    return VerificationReport.build(
        "reduction", params, margin, tolerance, witnesses=witnesses,
        details={"branch": "no_full_section", "gap": gap * spec.delta, "radius": r, "measure": mu.value},
    )
