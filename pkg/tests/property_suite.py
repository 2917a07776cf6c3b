"""Property checks that every builder must satisfy, shared between the
per-module tests and the acceptance suite."""

import numpy as np

from finbound.busemann import busemann_eval, curve_from_annotation, monotonicity_check
from finbound.chrono import CatalogEntry, FunctionCatalog, chr_limits, lifted_sequence
from finbound.completion import (PointSequence, build_catalog,
                                 extract_cauchy_subsequence,
                                 is_alternative_cauchy, is_forward_cauchy,
                                 are_equivalent)
from finbound.graph import SpaceSpec, build_graph
from finbound.gromov import SampledFunction, is_lipschitz1
from finbound.metric import DistanceOracle, check_generalized_axioms


def check_graph_oracle_axioms(space, count=25):
    """Suboracle of every builder: (a1)-(a3) exactly, zero-symmetry at
    ten times the edge quantum."""
    ids = list(range(0, space.n, max(1, space.n // count)))[:count]
    D = space.suboracle(ids)
    rep = check_generalized_axioms(D, tol=10 * space.quantum)
    assert rep.a1_ok and rep.a2_ok, "oracle separation failed"
    assert rep.a3_ok, f"triangle violated by {rep.a3_worst_violation:.4g}"
    assert rep.zero_symmetry_ok, f"zero-symmetry at {rep.zero_symmetry_witness}"


def check_dq_triangle(space, tol=0.02):
    """(a1)-(a3) of the class-level quasi-distance at 3x the inner tol."""
    cat = build_catalog(space, tol=tol)
    rep = check_generalized_axioms(DistanceOracle(cat.dq),
                                   tol=10 * space.quantum, slack=3 * tol)
    assert rep.a1_ok, "negative quasi-distance entry"
    assert rep.a2_ok, "vanishing quasi-distance between distinct classes"
    assert rep.a3_ok, f"triangle violated by {rep.a3_worst_violation:.4g} " \
                      f"at {rep.a3_witness}"
    return cat


def check_busemann_properties(space):
    """Monotonicity within 2h and the Lipschitz bound for every finite
    Busemann probe."""
    probe = space.annotations.get("probe_id", 0)
    base = space.annotations.get("base_id", 0)
    finite = []
    for name in sorted(space.annotations.get("curves", {})):
        curve = curve_from_annotation(space, name)
        worst = monotonicity_check(curve, probe, space)
        assert worst <= 2 * space.h, f"{name}: monotonicity violated by {worst:.4g}"
        b = busemann_eval(curve, space)
        if b.kind == "infinite":
            continue
        ref = space if curve.direction == "forward" else space.reverse_space()
        ok, slack, edge = is_lipschitz1(SampledFunction(
            b.values if curve.direction == "forward" else -b.values, base),
            ref, tol=2 * space.h)
        assert ok, f"{name}: Lipschitz violated by {slack:.4g} at {edge}"
        finite.append((name, b))
    return finite


def check_reverse_duality(space, sample_step=13):
    """The negated one-form reproduces the transposed distance matrix
    entrywise exactly (spec-built spaces); hand-built symmetric graphs
    must equal their own transpose."""
    ids = list(range(0, space.n, max(1, space.n // 25)))
    if space.spec.params.get("hand_built"):
        assert (space.csgraph != space.csgraph.T).nnz == 0
        return
    fields = dict(space.spec.fields or {})
    omega = fields.get("omega", ["0"] * space.dim)
    fields["omega"] = [f"0 - ({w})" for w in omega]
    neg_spec = SpaceSpec(kind=space.spec.kind + "-neg", chart=space.spec.chart,
                         domain=space.spec.domain,
                         resolution=space.spec.resolution,
                         fields=fields,
                         identifications=space.spec.identifications,
                         excisions=space.spec.excisions,
                         params=space.spec.params)
    neg = build_graph(neg_spec)
    m1 = space.dist_from(ids)[:, ids]
    m2 = neg.dist_from(ids)[:, ids]
    assert np.array_equal(m1, m2.T), "omega negation duality broken"


def check_chr_subsequence_monotonicity(space, tol=0.3):
    base = space.annotations.get("base_id", 0)
    entries = []
    for name in sorted(space.annotations.get("curves", {})):
        if name.endswith("_bwd"):
            continue
        curve = curve_from_annotation(space, name)
        if curve.direction != "forward":
            continue
        b = busemann_eval(curve, space)
        if b.kind != "infinite":
            entries.append(CatalogEntry(name, b.values))
    if not entries:
        interior = [space.annotations.get("probe_id", 0),
                    space.n // 2]
        entries = [CatalogEntry(f"pt{i}", -space.dist_to([i])[0])
                   for i in sorted(set(interior))]
    cat = FunctionCatalog(entries, base, class_tol=tol)
    seqs = space.annotations.get("sequences", {})
    name = "x_n" if "x_n" in seqs else (sorted(seqs)[0] if seqs else None)
    if name is None:
        return
    seq = lifted_sequence(space, seqs[name], base)
    full = chr_limits(seq, cat, tol=tol)
    for step in (2, 3):
        sub = seq[::step]
        if len(sub) >= 8:
            part = chr_limits(sub, cat, tol=tol)
            assert set(full.members) <= set(part.members), \
                f"{name}[::{step}]: members shrank"


def check_extraction_postconditions(space):
    seqs = space.annotations.get("sequences", {})
    ran = 0
    for name in sorted(seqs):
        if len(seqs[name]) < 12:
            continue
        sigma = PointSequence(seqs[name], source=name)
        alt = is_alternative_cauchy(sigma, space, (1.0, 0.3))
        try:
            fwd = is_forward_cauchy(sigma, space, (1.0, 0.3))
        except Exception:
            fwd = None
        if fwd is not None and fwd.passed:
            assert alt.passed, f"{name}: ordered pass without relaxed pass"
        if not alt.passed:
            continue
        try:
            sub = extract_cauchy_subsequence(sigma, space)
        except ValueError:
            continue
        assert is_forward_cauchy(sub, space, (1.0, 0.3)).passed, \
            f"{name}: extracted subsequence not ordered-Cauchy"
        cut = sigma.ids.index(sub.ids[-1]) + 1
        if cut >= 8:
            assert are_equivalent(sub, PointSequence(sigma.ids[:cut]),
                                  space, tol=0.1), f"{name}: not equivalent"
        ran += 1
    return ran


def check_forward_completeness_surrogate(space, tol=0.02):
    """For every forward class, tail representatives approach the class:
    lim_n d(x_n, z) estimates vanish."""
    cat = build_catalog(space, tol=tol)
    for cls in cat.classes:
        if cls.kind not in ("forward-boundary", "symmetrized-boundary"):
            continue
        ids = list(cls.representative.ids)
        M = space.dist_from(ids[-4:])[:, ids]
        w = cls.representative.window()
        for row in M:
            assert row[-w:].min() <= 3 * tol + 2 * space.h, \
                f"{cls.name}: tail does not approach its class"


def run_all(space, dq_tol=0.02, chr_tol=0.3):
    check_graph_oracle_axioms(space)
    check_dq_triangle(space, tol=dq_tol)
    check_busemann_properties(space)
    check_reverse_duality(space)
    check_chr_subsequence_monotonicity(space, tol=chr_tol)
    check_extraction_postconditions(space)
    check_forward_completeness_surrogate(space, tol=dq_tol)
