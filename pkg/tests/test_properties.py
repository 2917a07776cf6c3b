"""The per-builder property sweep (small configurations)."""

import pytest

import property_suite
from conftest import SMALL_PARAMS


@pytest.mark.parametrize("name", sorted(SMALL_PARAMS))
def test_builder_properties(name, all_small_builders):
    space = all_small_builders[name]
    property_suite.run_all(space)


def test_forward_ball_contains_other_tail(all_small_builders):
    """On the one-way ladder, deep tail points of the second core sit in
    small forward balls around the first core's tail, never conversely."""
    from finbound.metric import ball_membership
    space = all_small_builders["staircase_fig1"]
    z1 = space.annotations["sequences"]["z1_seq"]
    z2 = space.annotations["sequences"]["z2_seq"]
    D = space.suboracle([z1[-1], z2[-1]])
    assert ball_membership(D, center=0, radius=0.05, direction="forward",
                           probe=1)
    assert not ball_membership(D, center=1, radius=1.0, direction="forward",
                               probe=0)


def test_genersym_surrogate(all_small_builders):
    """When the catalog quasi-distance is zero-symmetric, every forward
    class is also backward (checked on the symmetric builders)."""
    from finbound.completion import build_catalog
    from finbound.metric import DistanceOracle, check_generalized_axioms
    for name in ("comb_basic", "comb_extended", "staircase_fig6"):
        space = all_small_builders[name]
        cat = build_catalog(space, tol=0.02)
        rep = check_generalized_axioms(DistanceOracle(cat.dq), tol=0.06,
                                       slack=0.06)
        if rep.zero_symmetry_ok:
            for cls in cat.classes:
                assert cls.kind in ("interior", "symmetrized-boundary"), \
                    f"{name}/{cls.name}: one-sided class in a zero-symmetric catalog"
