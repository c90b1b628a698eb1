import math

import numpy as np
import pytest
from scipy import ndimage

from expiso import grid as g
from expiso.analytic import ball_boundary, phi, psi

SMALL = g.GridSpec(2, 1 / 8, 4.0)  # 32 x 32


def random_set(spec, density, seed, blur=1):
    rng = np.random.default_rng(seed)
    occ = rng.random(spec.shape) < density
    if blur:
        occ = ndimage.binary_dilation(occ, iterations=blur)
    return occ


def padded(occ, k, tail):
    """Dense occupancy extended by ``k`` cells past every far face."""
    pad = [(0, k)] * occ.ndim
    return np.pad(occ, pad, constant_values=tail)


def brute_dilate(occ, k, tail=False, cone=False):
    big = padded(occ, k, tail)
    src = np.argwhere(big)
    out = np.zeros(occ.shape, dtype=bool)
    for idx in np.ndindex(occ.shape):
        diff = np.asarray(idx) - src
        dist = np.abs(diff).sum(axis=1)
        ok = dist <= k
        if cone:
            ok &= np.all(diff >= 0, axis=1) | np.all(diff <= 0, axis=1)
        out[idx] = ok.any()
    return out


# construction ------------------------------------------------------------

def test_gridspec_validation():
    with pytest.raises(ValueError):
        g.GridSpec(2, 0.3, 1.0)
    with pytest.raises(ValueError):
        g.GridSpec(2, 1.0, 4.0)
    with pytest.raises(ValueError):
        g.GridSpec(4, 0.5, 8.0)
    assert g.GridSpec.default(2).tail_bound < 1e-6
    assert g.GridSpec.default(3).tail_bound < 1e-6
    with pytest.raises(ValueError):
        SMALL.steps(0.1)


def test_origin_ball_is_simplex_and_matches_phi():
    spec = g.GridSpec(2, 1 / 512, 30.0)
    A = g.from_ball_union(spec, [[0.0, 0.0]], [1.0])
    assert A == g.simplex(spec, 1.0)
    est = g.measure(A)
    assert est.error_bound < 3e-3
    assert abs(est.value - phi(2, 1.0)) <= est.error_bound


def test_sub_cell_ball_is_one_cell():
    d = SMALL.delta
    centre = [(5 + 0.5) * d, (9 + 0.5) * d]
    A = g.from_ball_union(SMALL, [centre], [0.4 * d])
    occ = A.occupancy
    assert occ.sum() == 1 and occ[5, 9]


def test_disjoint_balls_additive():
    a = g.from_ball_union(SMALL, [[1.0, 1.0]], [0.5])
    b = g.from_ball_union(SMALL, [[3.0, 3.0]], [0.5])
    both = g.from_ball_union(SMALL, [[1.0, 1.0], [3.0, 3.0]], [0.5, 0.5])
    assert g.measure(both).value == pytest.approx(g.measure(a).value + g.measure(b).value, rel=1e-14)


def test_ball_union_errors():
    with pytest.raises(ValueError):
        g.from_ball_union(SMALL, np.zeros((0, 2)), [])
    with pytest.raises(ValueError):
        g.from_ball_union(SMALL, [[5.0, 1.0]], [1.0])
    with pytest.raises(ValueError):
        g.from_ball_union(SMALL, [[1.0, 1.0]], [-1.0])


def test_from_predicate_examples():
    full = g.from_predicate(SMALL, lambda x, y: np.ones_like(x, dtype=bool))
    est = g.measure(full)
    assert abs(est.value - (1 - SMALL.tail_bound)) <= est.error_bound
    empty = g.from_predicate(SMALL, lambda x, y: np.zeros_like(x, dtype=bool))
    assert g.measure(empty) == g.MeasureEstimate(0.0, 0.0)
    spec = g.GridSpec(2, 1 / 256, 30.0)
    comp = g.from_predicate(spec, lambda x, y: x + y > 2.0, includes_tail=True)
    assert comp == g.simplex(spec, 2.0, complement=True)
    est = g.measure(comp)
    assert abs(est.value - psi(2, 2.0)) <= est.error_bound


def test_tail_declaration_checked():
    occ = np.zeros(SMALL.shape, dtype=bool)
    with pytest.raises(ValueError):
        g.GridSet.from_dense(SMALL, occ, includes_tail=True)


def test_dense_round_trip():
    occ = random_set(SMALL, 0.05, 0)
    A = g.GridSet.from_dense(SMALL, occ)
    assert np.array_equal(A.occupancy, occ)
    assert A == g.GridSet.from_dense(SMALL, occ.copy())


# measure -------------------------------------------------------------------

def test_measure_special_sets():
    spec = g.GridSpec(2, 1 / 64, 30.0)
    full = g.measure(g.GridSet.full(spec))
    assert abs(full.value - 1.0) <= 1e-12 and full.error_bound == 0.0
    empty = g.measure(g.GridSet.empty(spec))
    assert empty.value == 0.0 and empty.error_bound == 0.0


def test_measure_is_exact_cell_integral():
    occ = random_set(SMALL, 0.05, 4)
    d = SMALL.delta
    i = np.arange(SMALL.cells)
    w = np.exp(-i * d) - np.exp(-(i + 1) * d)
    expected = (np.outer(w, w) * occ).sum()
    assert g.measure(g.GridSet.from_dense(SMALL, occ)).value == pytest.approx(expected, rel=1e-13)


def test_measure_3d_simplex():
    spec = g.GridSpec(3, 1 / 64, 20.0)
    est = g.measure(g.simplex(spec, 2.0))
    assert abs(est.value - phi(3, 2.0)) <= est.error_bound


def test_error_bound_shrinks_linearly():
    bounds = []
    for k in (128, 256, 512):
        spec = g.GridSpec(2, 1 / k, 30.0)
        est = g.measure(g.simplex(spec, 1.0))
        assert abs(est.value - phi(2, 1.0)) <= est.error_bound
        bounds.append(est.error_bound * k)
    assert bounds[1] <= 1.05 * bounds[0] and bounds[2] <= 1.05 * bounds[1]


def test_measure_monotone():
    occ = random_set(SMALL, 0.05, 5)
    A = g.GridSet.from_dense(SMALL, occ)
    B = g.GridSet.from_dense(SMALL, occ | random_set(SMALL, 0.05, 6))
    assert A.issubset(B) and g.measure(A).value <= g.measure(B).value


# distance and dilation --------------------------------------------------------

def test_distance_field_brute_force():
    occ = random_set(SMALL, 0.01, 7, blur=0)
    occ[3, 4] = True
    A = g.GridSet.from_dense(SMALL, occ)
    dist = g.l1_distance_field(A)
    src = np.argwhere(occ)
    for idx in np.ndindex(occ.shape):
        assert dist[idx] == pytest.approx(np.abs(src - idx).sum(axis=1).min() * SMALL.delta)


def test_distance_single_cell():
    occ = np.zeros(SMALL.shape, dtype=bool)
    occ[0, 0] = True
    dist = g.l1_distance_field(g.GridSet.from_dense(SMALL, occ))
    assert dist[0, 0] == 0 and dist[1, 0] == SMALL.delta
    i, j = np.indices(SMALL.shape)
    assert np.allclose(dist, (i + j) * SMALL.delta)
    with pytest.raises(ValueError):
        g.l1_distance_field(g.GridSet.empty(SMALL))


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("k", [1, 3])
def test_dilate_l1_brute_force(seed, k):
    occ = random_set(SMALL, 0.02, seed)
    A = g.GridSet.from_dense(SMALL, occ)
    assert np.array_equal(g.dilate_l1(A, k * SMALL.delta).occupancy, brute_dilate(occ, k))


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("k", [1, 4])
def test_dilate_T_brute_force(seed, k):
    occ = random_set(SMALL, 0.02, seed + 10)
    A = g.GridSet.from_dense(SMALL, occ)
    got = g.dilate_T(A, k * SMALL.delta).occupancy
    assert np.array_equal(got, brute_dilate(occ, k, cone=True))
    assert np.all(got <= g.dilate_l1(A, k * SMALL.delta).occupancy)


@pytest.mark.parametrize("metric", [g.L1, g.T])
def test_dilate_tail_set_brute_force(metric):
    A = g.simplex(SMALL, 3.0, complement=True)
    occ = A.occupancy & ~random_set(SMALL, 0.01, 3)
    occ[-1, :] = occ[:, -1] = True
    B = g.GridSet.from_dense(SMALL, occ, includes_tail=True)
    got = g.dilate(B, 2 * SMALL.delta, metric)
    assert got.includes_tail
    assert np.array_equal(got.occupancy, brute_dilate(occ, 2, tail=True, cone=metric == g.T))


def test_dilate_3d_brute_force():
    spec = g.GridSpec(3, 1 / 4, 3.0)
    occ = random_set(spec, 0.01, 1, blur=0)
    A = g.GridSet.from_dense(spec, occ)
    assert np.array_equal(g.dilate_l1(A, 2 * spec.delta).occupancy, brute_dilate(occ, 2))


def test_dilation_of_empty_and_invalid_h():
    E = g.GridSet.empty(SMALL)
    assert g.dilate_l1(E, SMALL.delta).is_empty()
    assert g.dilate_T(E, SMALL.delta).is_empty()
    A = g.simplex(SMALL, 1.0)
    with pytest.raises(ValueError):
        g.dilate_l1(A, 0.3 * SMALL.delta)
    with pytest.raises(ValueError):
        g.dilate_l1(A, -SMALL.delta)
    with pytest.raises(ValueError):
        g.dilate_T(g.simplex(g.GridSpec(3, 0.5, 4.0), 1.0), 0.5)


@pytest.mark.parametrize("t, k", [(0.5, 1), (1.0, 4), (1.5, 8), (2.0, 3)])
def test_ball_exactness(t, k):
    spec = g.GridSpec(2, 1 / 64, 10.0)
    h = k * spec.delta
    target = g.simplex(spec, t + h)
    A = g.simplex(spec, t)
    assert g.dilate_l1(A, h) == target
    assert g.dilate_T(A, h) == target
    comp = g.simplex(spec, t + h, complement=True)
    assert g.dilate_T(comp, h) == g.simplex(spec, t, complement=True)
    assert g.dilate_l1(comp, h) == g.simplex(spec, t, complement=True)


def test_union_of_balls_merges_under_dilation():
    spec = g.GridSpec(2, 1 / 16, 8.0)
    centres, radii = np.array([[1.0, 1.0], [2.0, 1.0]]), np.array([0.3, 0.3])
    A = g.from_ball_union(spec, centres, radii)
    assert len(g.connected_components(A)) == 2
    D = g.dilate_l1(A, 0.25)
    assert len(g.connected_components(D)) == 1
    # pointwise membership of the dilated union: within l1 distance r_i + h of some centre,
    # measured between cell centres on the lattice
    x = (np.arange(spec.cells) + 0.5) * spec.delta
    X, Y = np.meshgrid(x, x, indexing="ij")
    expected = np.zeros_like(X, dtype=bool)
    for (cx, cy), r in zip(centres, radii):
        expected |= np.abs(X - cx) + np.abs(Y - cy) <= r + 0.25 + 1e-12
    assert np.array_equal(D.occupancy, expected)


@pytest.mark.parametrize("seed", range(3))
def test_semigroup_l1(seed):
    A = g.GridSet.from_dense(SMALL, random_set(SMALL, 0.02, seed))
    d = SMALL.delta
    assert g.dilate_l1(g.dilate_l1(A, 2 * d), 3 * d) == g.dilate_l1(A, 5 * d)


def test_semigroup_T_on_radial_sets():
    d = SMALL.delta
    for A in (g.simplex(SMALL, 1.0), g.simplex(SMALL, 2.0, complement=True)):
        assert g.dilate_T(g.dilate_T(A, 2 * d), 3 * d) == g.dilate_T(A, 5 * d)


def test_T_is_not_a_semigroup_in_general():
    # T + T contains (1, -1) while 2T does not
    occ = np.zeros(SMALL.shape, dtype=bool)
    occ[10, 10] = True
    A = g.GridSet.from_dense(SMALL, occ)
    d = SMALL.delta
    twice = g.dilate_T(g.dilate_T(A, d), d).occupancy
    once = g.dilate_T(A, 2 * d).occupancy
    assert twice[11, 9] and not once[11, 9]
    assert np.all(once <= twice)


def test_dilation_monotone():
    occ = random_set(SMALL, 0.03, 8)
    A = g.GridSet.from_dense(SMALL, occ)
    B = g.GridSet.from_dense(SMALL, occ | random_set(SMALL, 0.02, 9))
    for metric in (g.L1, g.T):
        assert g.dilate(A, 2 * SMALL.delta, metric).issubset(g.dilate(B, 2 * SMALL.delta, metric))


def test_dilation_masses_match_explicit_dilation():
    A = g.from_ball_union(g.GridSpec(2, 1 / 32, 10.0), [[1, 1], [2.5, 0.3]], [0.6, 0.4])
    for metric in (g.L1, g.T):
        masses = g.dilation_masses(A, [0, 1, 3, 7], metric)
        for k, m in zip([0, 1, 3, 7], masses):
            assert m == pytest.approx(g.measure(g.dilate_steps(A, k, metric)).value, rel=1e-12)


def test_unconditional_neighbourhood_restricts_to_orthant():
    # simplex mirrored into all four quadrants, dilated in the plane, then cut back to the orthant
    N, r, k = 24, 1.0, 3
    d = SMALL.delta
    c = (np.arange(-N, N) + 0.5) * d
    X, Y = np.meshgrid(c, c, indexing="ij")
    ball = np.abs(X) + np.abs(Y) <= r + 1e-12
    src = np.argwhere(ball)
    full = np.zeros_like(ball)
    for idx in np.ndindex(ball.shape):
        full[idx] = (np.abs(src - idx).sum(axis=1) <= k).any()
    orth = g.dilate_l1(g.simplex(SMALL, r), k * d).occupancy[:N, :N]
    assert np.array_equal(full[N:, N:], orth)


# boundary estimates -------------------------------------------------------

def test_boundary_estimate_simplex():
    spec = g.GridSpec(2, 1 / 512, 30.0)
    A = g.simplex(spec, 1.0)
    for metric in (g.L1, g.T):
        value, err = g.boundary_estimate(A, metric)
        assert abs(value - math.exp(-1)) <= err


def test_boundary_estimate_full_and_trapezoid():
    spec = g.GridSpec(2, 1 / 256, 30.0)
    value, err = g.boundary_estimate(g.GridSet.full(spec))
    assert abs(value) <= err
    trap = g.intersection(g.simplex(spec, 2.0), g.simplex(spec, 1.0, complement=True))
    value, err = g.boundary_estimate(trap)
    assert abs(value - (math.exp(-1) + 2 * math.exp(-2))) <= err


def test_boundary_estimate_3d():
    A = g.simplex(g.GridSpec(3, 1 / 64, 20.0), 2.0)
    value, err = g.boundary_estimate(A)
    assert abs(value - ball_boundary(3, 2.0)) <= err


# set algebra ---------------------------------------------------------------

def test_set_algebra_identities():
    inner = np.zeros(SMALL.shape, dtype=bool)
    inner[:-4, :-4] = True
    A = g.GridSet.from_dense(SMALL, random_set(SMALL, 0.03, 11) & inner)
    B = g.GridSet.from_dense(SMALL, random_set(SMALL, 0.03, 12))
    E = g.GridSet.empty(SMALL)
    assert g.union(A, E) == A
    assert g.complement(g.complement(A)) == A
    assert g.complement(A).includes_tail
    assert np.array_equal(g.union(A, B).occupancy, A.occupancy | B.occupancy)
    assert np.array_equal(g.intersection(A, B).occupancy, A.occupancy & B.occupancy)
    total = g.measure(g.union(A, g.complement(A)))
    assert total.value == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        g.union(A, g.GridSet.empty(g.GridSpec(2, 1 / 16, 4.0)))
    with pytest.raises(ValueError):
        g.complement(g.GridSet.from_dense(SMALL, ~inner))


def test_components_of_two_balls():
    spec = g.GridSpec(2, 1 / 64, 10.0)
    big = g.from_ball_union(spec, [[1.0, 1.0]], [0.8])
    small = g.from_ball_union(spec, [[4.0, 4.0]], [0.5])
    parts = g.connected_components(g.union(small, big))
    assert len(parts) == 2
    assert parts[0] == big and parts[1] == small
    assert g.measure(parts[0]).value >= g.measure(parts[1]).value


def test_components_use_axis_neighbours():
    occ = np.zeros(SMALL.shape, dtype=bool)
    occ[2, 2] = occ[3, 3] = True
    assert len(g.connected_components(g.GridSet.from_dense(SMALL, occ))) == 2


def test_shift():
    A = g.from_ball_union(SMALL, [[2.0, 2.0]], [0.5])
    B = g.shift(A, (-3, 2))
    assert np.array_equal(B.occupancy, np.roll(A.occupancy, (-3, 2), axis=(0, 1)))
