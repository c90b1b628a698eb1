import json
import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from expiso import grid as g
from expiso.analytic import AnalyticProfile, phi
from expiso.profile import symmetrize
from expiso.verify import (
    ANALYTIC_TOLERANCE, FAIL, INCONCLUSIVE, PASS, ReductionWitness, VerificationReport,
    counterexample_check, sample_component_pairs, trapezoid_grid, verify_component_lemma,
    verify_isoperimetry, verify_neighborhood_form, verify_poisson_median, verify_reduction,
    verify_symmetrisation, verify_trapezoid_lemma,
)

SPEC = g.GridSpec(2, 1 / 512, 30.0)
COARSE = g.GridSpec(2, 1 / 128, 30.0)


def ladder(spec, factors=(2, 4, 8)):
    return [k * spec.delta for k in factors]


# reports ----------------------------------------------------------------------

def test_report_verdicts():
    assert VerificationReport.build("x", {}, -1e-12, 1e-10).verdict == PASS
    assert VerificationReport.build("x", {}, -1e-3, 1e-10, margin_upper=1e-3).verdict == INCONCLUSIVE
    assert VerificationReport.build("x", {}, -1e-3, 1e-10, margin_upper=-1e-4).verdict == FAIL
    assert VerificationReport.build("x", {}, -1e-3, 1e-10).verdict == FAIL


def test_report_witnesses_sorted_and_json():
    ws = [{"margin": m, "k": i} for i, m in enumerate([3.0, -1.0, 2.0, math.inf])]
    r = VerificationReport.build("x", {"b": math.inf}, -1.0, 0.5, witnesses=ws)
    assert [w["margin"] for w in r.witnesses] == sorted(w["margin"] for w in ws)
    d = r.to_dict()
    assert set(d) >= {"check_name", "parameters", "margin", "tolerance", "verdict", "witnesses"}
    json.dumps(d, allow_nan=False)
    assert d["parameters"]["b"] == "inf"


# analytic verifiers ----------------------------------------------------------------

def test_trapezoid_spot_value():
    r = verify_trapezoid_lemma(2, [1.0], [2.0])
    w = r.witnesses[0]
    p = 2 / math.e - 3 / math.e ** 2
    c = float(mpmath.findroot(lambda t: (1 + t) * mpmath.exp(-t) - p, 2.3))
    assert w["comparison"] == pytest.approx(c * math.exp(-c), abs=1e-12)
    assert w["boundary"] == pytest.approx(0.638550, abs=1e-6)
    assert r.margin == pytest.approx(0.4086, abs=1e-3)
    assert r.passed


def test_trapezoid_self_extremal_pairs_are_zero():
    P = AnalyticProfile.of(2)
    m = P.phi_inv(0.5)
    r = verify_trapezoid_lemma(2, [0.0], [m + 0.5, m + 3.0])
    assert r.margin == 0.0
    r = verify_trapezoid_lemma(2, [m + 0.2, m + 4.0], [math.inf])
    assert r.margin == 0.0


def test_trapezoid_sweep_n5_and_default_grid():
    assert verify_trapezoid_lemma(5, [3.0], [6.0]).margin >= 0
    a, b = trapezoid_grid()
    assert a.size == b.size == 200 and a[0] == 0.0 and math.isinf(b[-1])
    for n in (2, 3):
        r = verify_trapezoid_lemma(n)
        assert r.passed and r.margin >= -ANALYTIC_TOLERANCE
        assert r.parameters["pairs"] + r.parameters["skipped"] == sum(
            1 for x in a for y in b if x < y)


def test_trapezoid_comparison_independent_oracle():
    # comparison computed here from scipy quadrature for a handful of shells
    for n, a, b in [(3, 0.5, 1.5), (4, 2.0, 9.0), (2, 0.2, 0.4)]:
        r = verify_trapezoid_lemma(n, [a], [b])
        dens = lambda t: math.exp(-t) * t ** (n - 1) / math.factorial(n - 1)
        p = integrate.quad(dens, a, b)[0]
        if p >= 0.5:
            t = float(mpmath.findroot(lambda s: mpmath.gammainc(n, 0, s, regularized=True) - p, n))
        else:
            t = float(mpmath.findroot(lambda s: mpmath.gammainc(n, s, mpmath.inf, regularized=True) - p, n + 1))
        assert r.witnesses[0]["comparison"] == pytest.approx(dens(t), rel=1e-9)


def test_component_examples():
    P = AnalyticProfile.of(2)
    x = P.psi_inv(1e-6)
    r = verify_component_lemma(2, [(x, x, 1)])
    assert r.witnesses[0]["z"] == pytest.approx(P.psi_inv(2e-6), rel=1e-12)
    assert r.margin > 0
    r = verify_component_lemma(2, [(x, math.inf, 1)])
    assert r.witnesses[0]["z"] == pytest.approx(x, rel=1e-12) and r.margin == pytest.approx(0.0, abs=1e-15)
    r = verify_component_lemma(2, [(P.psi_inv(0.2), P.phi_inv(0.6), 3)])
    assert r.witnesses[0]["z"] == pytest.approx(P.phi_inv(0.8), rel=1e-12)
    assert r.passed and r.margin >= 0


def test_component_rejects_bad_samples():
    P = AnalyticProfile.of(2)
    with pytest.raises(ValueError):
        verify_component_lemma(2, [(P.psi_inv(0.4), P.psi_inv(0.3), 1)])
    with pytest.raises(ValueError):
        verify_component_lemma(2, [(P.psi_inv(0.1), P.psi_inv(0.1), 2)])
    with pytest.raises(ValueError):
        verify_component_lemma(2, [(1.0, 1.0, 4)])
    with pytest.raises(ValueError):
        verify_component_lemma(2, [])


@pytest.mark.parametrize("n", range(2, 7))
def test_component_sweep(n):
    samples = sample_component_pairs(n, 2000, seed=1)
    assert {c for _, _, c in samples} == {1, 2, 3}
    r = verify_component_lemma(n, samples)
    assert r.passed, r.witnesses[:2]
    assert sample_component_pairs(n, 50, seed=1) == sample_component_pairs(n, 50, seed=1)


def test_poisson_median_report():
    r = verify_poisson_median(200)
    assert r.passed and r.margin > 0
    assert all(w["margin"] >= 0 and w["strict_upper"] for w in r.witnesses)
    assert verify_poisson_median(1).details["cdf_at_k_max"] == pytest.approx(2 / math.e, abs=1e-15)
    assert 0.5 < verify_poisson_median(100).details["cdf_at_k_max"] < 0.55
    with pytest.raises(ValueError):
        verify_poisson_median(201)


def test_counterexample_against_convolution_oracle():
    r = counterexample_check()
    # density of x + y for independent Laplace coordinates, by numerical convolution
    lap = lambda x: 0.5 * math.exp(-abs(x))
    dens = lambda s: integrate.quad(lambda x: lap(x) * lap(s - x), -np.inf, np.inf, points=None)[0]
    assert dens(3.0) == pytest.approx(math.exp(-3), rel=1e-7)
    tail = integrate.quad(dens, 3.0, np.inf)[0]
    assert r.details["half_plane_measure"] == pytest.approx(1 - tail, abs=1e-8)
    assert r.details["half_plane_measure"] == pytest.approx(0.937766, abs=1e-6)
    assert r.details["half_plane_boundary"] == pytest.approx(0.0497871, abs=1e-7)
    radius = float(mpmath.findroot(lambda t: (1 + t) * mpmath.exp(-t) - tail, 4.5))
    assert r.details["ball_radius"] == pytest.approx(radius, abs=1e-7)
    assert r.details["ball_radius"] == pytest.approx(4.477, abs=1e-3)
    assert r.details["ball_boundary"] == pytest.approx(0.0509, abs=1e-4)
    assert r.margin > 1e-3 and r.passed and r.details["strict"]


# grid verifiers ----------------------------------------------------------------

def test_isoperimetry_simplex_saturates():
    hs = ladder(SPEC)
    r = verify_isoperimetry(g.simplex(SPEC, 2.0), hs)
    assert r.passed
    # the extremal set meets the bound up to the quadratic slack
    assert 0 <= r.margin <= 2 * max(hs) ** 2
    assert r.details["L_needed"] == 0.0 and not r.details["anomaly"]


def test_isoperimetry_off_origin_ball_and_components():
    hs = ladder(SPEC)
    single = verify_isoperimetry(g.from_ball_union(SPEC, [[1.5, 1.5]], [1.5]), hs)
    assert single.passed and single.margin > 0
    pair = verify_isoperimetry(g.from_ball_union(SPEC, [[0.5, 0.5], [4.0, 4.0]], [1.5, 1.5]), hs)
    assert pair.passed and pair.margin > 0


def test_isoperimetry_complement_side():
    r = verify_isoperimetry(g.simplex(SPEC, 2.5, complement=True), ladder(SPEC))
    assert r.passed
    assert r.details["comparison_kind"] == "complement"


def test_isoperimetry_flags_violations():
    # with a negative quadratic allowance even the extremal set cannot pass
    r = verify_isoperimetry(g.simplex(SPEC, 2.0), ladder(SPEC), L=-50.0)
    assert r.verdict == FAIL


def test_isoperimetry_rejects_degenerate():
    with pytest.raises(ValueError):
        verify_isoperimetry(g.from_ball_union(SPEC, [[1.0, 1.0]], [0.003]), ladder(SPEC))
    with pytest.raises(ValueError):
        verify_isoperimetry(g.GridSet.full(SPEC), ladder(SPEC))


def test_isoperimetry_3d_origin_ball():
    spec = g.GridSpec(3, 1 / 64, 20.0)
    r = verify_isoperimetry(g.simplex(spec, 2.5), ladder(spec, (1, 2, 4)))
    assert r.passed and r.margin <= 2 * (4 * spec.delta) ** 2


def test_refinement_consistency():
    A_coarse = g.from_ball_union(COARSE, [[0.7, 1.2], [2.0, 0.4]], [0.8, 0.6])
    A_fine = g.from_ball_union(COARSE.refined(), [[0.7, 1.2], [2.0, 0.4]], [0.8, 0.6])
    hs = ladder(COARSE, (2, 4))
    a, b = verify_isoperimetry(A_coarse, hs), verify_isoperimetry(A_fine, hs)
    band = a.margin_upper - a.margin + g.measure(A_coarse).error_bound
    assert abs(a.margin - b.margin) <= band


def test_neighborhood_form_examples():
    h = 4 * SPEC.delta
    S = g.simplex(SPEC, 2.0)
    r = verify_neighborhood_form(S, h)
    assert r.passed and abs(r.margin) < 1e-8 and r.parameters["form"] == 1
    B = g.from_ball_union(SPEC, [[0.5, 0.5]], [2.5])
    assert verify_neighborhood_form(B, h).passed
    small = verify_neighborhood_form(g.simplex(SPEC, 1.0), h)
    assert small.parameters["form"] == 2 and small.passed
    # measure below 1/2 but the neighbourhood crosses it: neither form applies
    just_below = g.simplex(SPEC, 1.67)
    with pytest.raises(ValueError):
        verify_neighborhood_form(just_below, 8 * SPEC.delta)


def test_symmetrisation_examples():
    hs = ladder(SPEC)
    C = symmetrize(g.from_ball_union(SPEC, [[1.0, 2.0]], [1.0]))
    r = verify_symmetrisation(C, hs)
    assert r.passed
    assert r.details["measure_C"] == r.details["measure_A"]
    assert r.details["growth_margin"] == 0.0
    r = verify_symmetrisation(g.from_ball_union(SPEC, [[1.0, 2.0]], [1.0]), hs)
    assert r.passed
    assert abs(r.details["measure_A"] - r.details["measure_C"]) <= r.details["error_band"]
    three = g.from_ball_union(SPEC, [[0.3, 1.0], [1.5, 0.2], [2.0, 2.0]], [0.6, 0.5, 0.7])
    assert verify_symmetrisation(three, hs).passed
    with pytest.raises(ValueError):
        verify_symmetrisation(g.simplex(g.GridSpec(3, 0.5, 4.0), 1.0), [0.5])


def test_reduction_simplex():
    w, r = verify_reduction(g.simplex(SPEC, 1.5))
    assert isinstance(w, ReductionWitness)
    assert w.a <= w.u <= w.b
    assert w.a == 0.0 and w.u == pytest.approx(SPEC.delta)
    assert phi(2, w.b) == pytest.approx(g.measure(g.simplex(SPEC, 1.5)).value, abs=1e-12)
    assert r.passed and r.details["branch"] == "full_section"


def test_reduction_full_section_ball():
    A = g.from_ball_union(SPEC, [[1.0, 1.0]], [1.5])
    w, r = verify_reduction(A)
    assert r.passed
    assert w.a <= w.u <= w.b and w.h0 >= 0 and w.R_lambda_mass >= 0
    assert w.u == pytest.approx(r.details["u"])
    # measure-matching relations against the grid staircase of radius u
    C = symmetrize(A)
    stair = g.simplex(SPEC, w.u)
    S = g.measure(stair).value
    below = g.measure(g.intersection(C, stair)).value
    above = g.measure(C).value - below
    assert phi(2, w.a) == pytest.approx(S - below, abs=1e-12)
    assert phi(2, w.b) == pytest.approx(S + above, abs=1e-12)
    assert r.details["below_checked"] >= 1


def test_reduction_no_full_section():
    A = g.from_ball_union(SPEC, [[2.0, 2.0]], [1.0])
    w, r = verify_reduction(A)
    assert r.details["branch"] == "no_full_section"
    assert w is None
    assert r.passed
    for wi in r.witnesses:
        # shifting toward the axis scales the measure by e^h exactly (up to cells leaving the box)
        assert wi["shifted"] == pytest.approx(wi["scaled"], rel=1e-12)


def test_reduction_rejects():
    with pytest.raises(ValueError):
        verify_reduction(g.from_ball_union(SPEC, [[1.0, 1.0], [5.0, 5.0]], [0.5, 0.5]))
    with pytest.raises(ValueError):
        verify_reduction(g.simplex(SPEC, 2.0, complement=True))


def test_reports_reproducible():
    A = g.from_ball_union(COARSE, [[1.0, 1.0]], [1.2])
    hs = ladder(COARSE)
    a = verify_isoperimetry(A, hs).to_dict()
    b = verify_isoperimetry(g.from_ball_union(COARSE, [[1.0, 1.0]], [1.2]), hs).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
