import math

import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest
from scipy.integrate import quad

from finbound.extreal import ExtendedNonNeg
from finbound.graph import (EDGE_QUANTUM, BuildError, SpaceSpec, build_graph,
                            shortest_distance)
from finbound.metric import check_generalized_axioms
from finbound.randers import RandersData, randers_norm, segment_length
from finbound.spaces import BUILDERS, flat_square, halfline_r2, punctured_disk


def eight_neighbor_distance(dx, dy):
    """Closed-form shortest path on the 8-neighbor unit grid metric."""
    dx, dy = abs(dx), abs(dy)
    lo, hi = min(dx, dy), max(dx, dy)
    return (hi - lo) + lo * math.sqrt(2)


def test_interval_counts():
    spec = SpaceSpec(chart="line", domain=((0.1, 10.0),), resolution=0.1,
                     fields={"g0": "1", "omega": ["0"]})
    space = build_graph(spec)
    assert space.n == 100
    rows, cols, w = space.edge_arrays()
    assert len(w) == 198


def test_cylinder_gluing_shares_ids():
    spec = SpaceSpec(chart="cartesian", domain=((-6.0, 6.0), (0.0, 1.0)),
                     resolution=0.5, identifications=({"axis": 0},))
    space = build_graph(spec)
    xs = sorted(set(space.points[:, 0]))
    assert 6.0 not in xs and -6.0 in xs          # one seam column only
    assert space.n == 24 * 3
    # a seam edge exists: from x=5.5 to x=-6.0 at equal height
    a = space.nearest_id((5.5, 0.0))
    b = space.nearest_id((-6.0, 0.0))
    assert space.csgraph[a, b] > 0


def test_excision_blocks_slit_crossings():
    space = punctured_disk(h_r=0.05, h_theta=math.pi / 20, n_terms=8)
    th = space.points[:, 1]
    # no samples on the slit ray, and the angular range stays open
    assert th.min() > -math.pi and th.max() < math.pi
    a = space.nearest_id((0.5, th.max()))
    b = space.nearest_id((0.5, th.min()))
    # crossing the slit directly is impossible: the path must wind back
    d = space.dist_from([a])[0][b]
    assert d > 0.5 * 0.5 * (th.max() - th.min())


def test_flat_classic_distances_closed_form():
    space = flat_square(L=2.0, h=0.05, w=(0.5, 0.0), form="classic")
    a = space.nearest_id((0.0, 0.0))
    b = space.nearest_id((1.0, 0.0))
    d_ab = space.dist_from([a])[0][b]
    d_ba = space.dist_from([b])[0][a]
    assert d_ab == pytest.approx(1.5, abs=0.02)
    assert d_ba == pytest.approx(0.5, abs=0.02)


def test_flat_euclidean_eight_neighbor_value():
    space = flat_square(L=2.0, h=0.05, w=(0.0, 0.0), form="classic")
    a = space.nearest_id((0.0, 0.0))
    c = space.nearest_id((1.2, 1.6))   # a 3-4-5 direction
    d = space.dist_from([a])[0][c]
    expect = eight_neighbor_distance(1.2, 1.6)
    assert d == pytest.approx(expect, abs=0.005)
    # and the documented anisotropy bound against the true metric
    assert d <= math.hypot(1.2, 1.6) * 1.0824 + 0.01
    assert d >= math.hypot(1.2, 1.6) - 1e-9


def test_refinement_consistency():
    vals = {}
    for h in (0.1, 0.05):
        space = flat_square(L=2.0, h=h, w=(0.0, 0.0), form="classic")
        a = space.nearest_id((0.2, 0.2))
        b = space.nearest_id((1.4, 1.8))
        vals[h] = space.dist_from([a])[0][b]
    assert abs(vals[0.05] - vals[0.1]) <= 0.0824 * vals[0.1] + 0.02


def test_shortest_distance_contract():
    space = flat_square(L=1.0, h=0.1)
    out = shortest_distance(space, 0, [0, 5, space.n - 1])
    assert isinstance(out[0], ExtendedNonNeg)
    assert out[0] == 0.0
    assert all(v.is_finite for v in out)


def test_graph_oracle_satisfies_axioms_exactly():
    space = flat_square(L=1.0, h=0.1, w=(0.3, 0.0), form="classic")
    ids = list(range(0, space.n, 7))[:40]
    D = space.suboracle(ids)
    rep = check_generalized_axioms(D, tol=10 * EDGE_QUANTUM)
    assert rep.a1_ok and rep.a2_ok and rep.a3_ok
    assert rep.zero_symmetry_ok


def test_reverse_duality_exact():
    """The distance matrix of the negated one-form equals the transposed
    matrix of the original, entrywise exactly."""
    base = dict(chart="cartesian", domain=((0.0, 1.0), (0.0, 1.0)),
                resolution=0.1)
    omega = ["0.2", "0.3 * x"]
    neg_omega = ["0 - (0.2)", "0 - (0.3 * x)"]
    s1 = build_graph(SpaceSpec(fields={"g0": [["1", "0"], ["0", "1"]],
                                       "omega": omega}, **base))
    s2 = build_graph(SpaceSpec(fields={"g0": [["1", "0"], ["0", "1"]],
                                       "omega": neg_omega}, **base))
    ids = list(range(0, s1.n, 5))
    m1 = s1.dist_from(ids)[:, ids]
    m2 = s2.dist_from(ids)[:, ids]
    assert np.array_equal(m1, m2.T)
    # and the reversed-space shortcut agrees
    m3 = s1.reverse_space().dist_from(ids)[:, ids]
    assert np.array_equal(m2, m3)


def test_classic_positivity_violation_is_build_error():
    with pytest.raises(BuildError, match="positivity"):
        flat_square(L=1.0, h=0.2, w=(1.1, 0.0), form="classic")
    # the same one-form is fine in the fermat convention
    flat_square(L=1.0, h=0.2, w=(1.1, 0.0), form="fermat")


def test_degenerate_g0_is_build_error():
    spec = SpaceSpec(chart="line", domain=((0.0, 1.0),), resolution=0.25,
                     fields={"g0": "0", "omega": ["0"]})
    with pytest.raises(BuildError):
        build_graph(spec)


def test_disconnected_sample_is_build_error():
    spec = SpaceSpec(chart="cartesian", domain=((0.0, 1.0), (0.0, 1.0)),
                     resolution=0.1,
                     excisions=({"min": (0.4, -1.0), "max": (0.6, 2.0)},))
    with pytest.raises(BuildError, match="connected"):
        build_graph(spec)
    build_graph(SpaceSpec(chart="cartesian", domain=((0.0, 1.0), (0.0, 1.0)),
                          resolution=0.1,
                          excisions=({"min": (0.4, -1.0), "max": (0.6, 2.0)},),
                          params={"allow_disconnected": True}))


def test_randers_norm_hand_values():
    R = RandersData.euclidean(2, omega=[0.5, 0.0], form="fermat")
    assert randers_norm(R, (0.0, 0.0), (3.0, 4.0)) != 5.0
    R0 = RandersData.euclidean(2, omega=[0.0, 0.0], form="fermat")
    assert randers_norm(R0, (0.0, 0.0), (3.0, 4.0)) == pytest.approx(5.0)
    val = randers_norm(R, (0.2, 0.7), (1.0, 0.0))
    assert val == pytest.approx(math.sqrt(1.25) + 0.5, abs=1e-12)
    rev = randers_norm(R, (0.2, 0.7), (-1.0, 0.0))
    assert rev == pytest.approx(math.sqrt(1.25) - 0.5, abs=1e-12)
    Rneg = RandersData.euclidean(2, omega=[-0.5, 0.0], form="fermat")
    assert rev == pytest.approx(randers_norm(Rneg, (0.2, 0.7), (1.0, 0.0)))


@hypothesis.given(st.floats(min_value=0.05, max_value=8.0),
                  st.floats(min_value=-2.0, max_value=2.0),
                  st.floats(min_value=-2.0, max_value=2.0))
@hypothesis.settings(max_examples=60, deadline=None)
def test_randers_norm_positively_homogeneous(lam, vx, vy):
    hypothesis.assume(abs(vx) + abs(vy) > 1e-3)
    R = RandersData.from_fields([["1", "0"], ["0", "1 + x*x"]],
                                ["0.3", "0 - 0.4"], form="fermat")
    at = (0.3, 0.8)
    base = randers_norm(R, at, (vx, vy))
    assert base > 0
    scaled = randers_norm(R, at, (lam * vx, lam * vy))
    assert scaled == pytest.approx(lam * base, rel=1e-9)


@pytest.mark.parametrize("lam", [0.5, 2.0, 7.0])
def test_randers_norm_homogeneity_pinned_factors(lam):
    R = RandersData.from_fields([["1", "0"], ["0", "1 + x*x"]],
                                ["0.3", "0 - 0.4"], form="fermat")
    for at in ((0.3, 0.8), (1.0, -0.2)):
        for v in ((1.0, 0.0), (0.7, -0.4), (-1.0, 2.0)):
            base = randers_norm(R, at, v)
            scaled = randers_norm(R, at, (lam * v[0], lam * v[1]))
            assert scaled == pytest.approx(lam * base, rel=1e-12)


def test_segment_length_closed_forms():
    R0 = RandersData.euclidean(2, omega=[0.0, 0.0], form="classic")
    assert segment_length(R0, (0, 0), (3, 4), steps=16) == pytest.approx(5.0, abs=1e-9)
    Rw = RandersData.euclidean(2, omega=[0.5, 0.0], form="classic")
    assert segment_length(Rw, (0, 0), (1, 0), steps=8) == pytest.approx(1.5)
    assert segment_length(Rw, (1, 0), (0, 0), steps=8) == pytest.approx(0.5)


def test_halfline_distance_against_quadrature():
    space = halfline_r2(T=20.0, h=0.02, n_terms=8)
    a = space.nearest_id((2.0,))
    b = space.nearest_id((1.0,))
    graph_left = space.dist_from([a])[0][b]
    oracle_left = quad(lambda x: math.sqrt(1 + 1 / (1 + x * x)) + 1, 1.0, 2.0)[0]
    assert graph_left == pytest.approx(oracle_left, abs=5e-3)
    graph_right = space.dist_from([b])[0][a]
    oracle_right = quad(lambda x: math.sqrt(1 + 1 / (1 + x * x)) - 1, 1.0, 2.0)[0]
    assert graph_right == pytest.approx(oracle_right, abs=5e-3)


def test_build_example_unknown_name():
    from finbound.spaces import build_example
    with pytest.raises(KeyError):
        build_example("nope")
    assert set(BUILDERS) >= {"halfline_r2", "punctured_disk", "staircase_fig1",
                             "cylinder_fig2", "comb_basic", "comb_extended",
                             "chimney1", "chimney2", "double_fig2"}


def test_rebuild_is_deterministic():
    s1 = flat_square(L=1.0, h=0.1, w=(0.2, 0.0), form="classic")
    s2 = flat_square(L=1.0, h=0.1, w=(0.2, 0.0), form="classic")
    assert np.array_equal(s1.points, s2.points)
    assert (s1.csgraph != s2.csgraph).nnz == 0
