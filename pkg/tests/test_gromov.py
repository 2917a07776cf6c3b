import numpy as np
import pytest

from finbound.completion import PointSequence, build_catalog
from finbound.gromov import (NormalizedClass, SampledFunction, class_equal,
                             d1_metric, d1_metric_dominated, gromov_classify,
                             is_lipschitz1, lipschitz_envelope,
                             minus_dist_to_class, normalize_at, pointwise_limit,
                             write_function_csv)
from finbound.chrono import lifted_sequence


@pytest.fixture(scope="module")
def flat(small_spaces):
    return small_spaces("flat_square", L=1.0, h=0.1)


def test_lipschitz_audit(flat):
    x = flat.nearest_id((0.5, 0.5))
    f = SampledFunction(-flat.dist_to([x])[0], 0)
    ok, worst, _ = is_lipschitz1(f, flat, tol=1e-12)
    assert ok and worst <= 0
    bad = SampledFunction(2.0 * flat.dist_to([x])[0], 0)
    ok, worst, edge = is_lipschitz1(bad, flat, tol=1e-9)
    assert not ok and worst > 0
    const = SampledFunction(np.full(flat.n, 3.7), 0)
    assert is_lipschitz1(const, flat, tol=0.0)[0]


def test_normalize_idempotent_and_class_equality(flat):
    f = SampledFunction(np.sin(flat.points[:, 0]), 5)
    n1 = normalize_at(f, 5)
    n2 = normalize_at(n1, 5)
    assert np.array_equal(n1.values, n2.values)
    shifted = SampledFunction(f.values + 4.2, 5)
    assert class_equal(f, shifted, tol=1e-12)
    assert np.allclose(normalize_at(shifted, 5).values, n1.values, atol=1e-12)


def test_d1_metric_values(flat):
    base = flat.nearest_id((0.0, 0.0))
    f = SampledFunction(np.cos(flat.points[:, 1]), base)
    assert d1_metric(f, f, base, flat) == 0.0
    g = SampledFunction(f.values + 2.0, base)
    val = d1_metric(f, g, base, flat)
    assert val == pytest.approx(2.0)    # attained at the base point
    assert d1_metric(f, g, base, flat) == d1_metric(g, f, base, flat)
    assert d1_metric_dominated(f, g, base, flat) <= val


def test_d1_convergence_iff_pointwise_on_finite_sample(flat):
    base = 0
    f = SampledFunction(np.zeros(flat.n), base)
    seq = [SampledFunction(np.full(flat.n, 1.0 / (k + 1)), base)
           for k in range(20)]
    vals = [d1_metric(g, f, base, flat) for g in seq]
    assert vals[-1] < vals[0] and vals[-1] < 0.06
    sup = [np.abs(g.values - f.values).max() for g in seq]
    assert all(v <= s for v, s in zip(vals, sup))
    # and d1 -> 0 forces pointwise convergence: the envelope factor is bounded
    env = 1.0 + np.max(flat.dist_from([base])[0]) ** 2
    assert all(s <= env * v + 1e-12 for v, s in zip(vals, sup))


def test_pointwise_limit_constant_and_convergent(flat):
    base = 0
    target = NormalizedClass(-flat.dist_to([10])[0]
                             + flat.dist_to([10])[0][base], base)
    seq = [normalize_at(SampledFunction(target.values + 0.5 ** k * 0.3, base),
                        base)
           for k in range(12)]
    pl = pointwise_limit(seq, tol=0.05)
    assert pl.verdict == "limit"
    assert np.abs(pl.limit.values - target.values).max() <= 0.05


def test_pointwise_limit_divergence_and_oscillation(flat):
    base = 0
    nbr = 1
    seq = []
    for k in range(12):
        v = np.zeros(flat.n)
        v[nbr] = float(k)
        seq.append(NormalizedClass(v, base))
    pl = pointwise_limit(seq, tol=0.25)
    assert pl.verdict == "diverges" and pl.divergence_sign == 1

    osc = []
    for k in range(16):
        v = np.zeros(flat.n)
        v[2:] = 1.0 if k % 2 == 0 else -1.0
        osc.append(NormalizedClass(v, base))
    pl2 = pointwise_limit(osc, tol=0.25)
    assert pl2.verdict == "no-limit"
    assert pl2.worst_sample is not None and pl2.worst_sample >= 2


def test_pointwise_limit_of_converging_centers(small_spaces):
    """Normalized -d(., x_n) with x_n -> x recovers -d(., x)."""
    space = small_spaces("flat_square", L=1.0, h=0.1)
    base = space.annotations["base_id"]
    ids = [space.nearest_id((0.5 + 0.4 * 0.6 ** k, 0.5)) for k in range(12)]
    lift = [NormalizedClass(f, base) for f in lifted_sequence(space, ids, base)]
    pl = pointwise_limit(lift, tol=0.05)
    assert pl.verdict == "limit"
    x = ids[-1]
    d = space.dist_to([x])[0]
    target = -(d - d[base])
    assert np.abs((pl.limit.values - target)[pl.stable_mask]).max() <= 0.05
    cat = build_catalog(space, tol=0.02, sequence_names=[])
    tag = gromov_classify(pl, cat, witness_radii=[1.0, 1.0], tol=0.05)
    assert tag.tag == "M-point" and int(tag.matched) == x


def test_gromov_classify_proper_for_unbounded_witness(small_spaces):
    space = small_spaces("flat_square", L=1.0, h=0.1)
    base = space.annotations["base_id"]
    ids = [space.nearest_id((x, 0.5)) for x in np.arange(0.1, 1.0, 0.1)]
    lift = [NormalizedClass(f, base) for f in lifted_sequence(space, ids, base)]
    pl = pointwise_limit(lift, tol=0.3,
                         envelope=lipschitz_envelope(space, base))
    cat = build_catalog(space, tol=0.02, sequence_names=[])
    tag = gromov_classify(pl, cat, witness_radii=[0.5, 1.0, 2.0], tol=0.05)
    assert tag.tag == "proper_gromov"


def test_minus_dist_to_class_matches_interior(small_spaces):
    space = small_spaces("flat_square", L=1.0, h=0.1)
    base = space.annotations["base_id"]
    x = space.nearest_id((0.7, 0.3))
    from finbound.completion import classify_boundary_point
    cls = classify_boundary_point(PointSequence((x,) * 10), space)
    g = minus_dist_to_class(space, cls, base)
    d = space.dist_to([x])[0]
    assert np.array_equal(g.values, -(d - d[base]))


def test_busemann_class_is_pointwise_limit_of_its_own_chain(small_spaces):
    """The normalized class of a finite Busemann function is recovered as
    the pointwise limit of the -d(., c(s_k)) classes along its curve."""
    from finbound.busemann import busemann_eval, curve_from_annotation
    space = small_spaces("cylinder_fig2", T=12.0)
    base = space.annotations["base_id"]
    curve = curve_from_annotation(space, "c1")
    b = busemann_eval(curve, space)
    picks = np.unique(np.linspace(0, len(curve.ids) - 1, 16).astype(int))
    lift = [NormalizedClass(f, base)
            for f in lifted_sequence(space, [curve.ids[k] for k in picks], base)]
    pl = pointwise_limit(lift, tol=0.25,
                         envelope=lipschitz_envelope(space, base))
    assert pl.verdict == "limit"
    nb = b.values - b.values[base]
    # the window median lags the deepest curve sample by the slow part of
    # the tail at this truncation; half a unit bounds it comfortably here
    assert np.abs((pl.limit.values - nb)[pl.stable_mask]).max() <= 0.5


def test_function_csv_export(tmp_path, flat):
    f = SampledFunction(np.arange(flat.n, dtype=float), 0)
    path = tmp_path / "f.csv"
    write_function_csv(path, flat, f)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == flat.n + 1
    assert lines[0].startswith("id,coord0,coord1,value")
