import itertools
import math

import numpy as np
import pytest

from finbound.metric import (DistanceOracle, ball_membership,
                             check_generalized_axioms, read_matrix_csv,
                             reverse, symmetrize, write_matrix_csv)


def euclidean_oracle():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
    m = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    return DistanceOracle(m, labels=[tuple(p) for p in pts])


def test_euclidean_four_points_pass():
    rep = check_generalized_axioms(euclidean_oracle(), tol=1e-9)
    assert rep.a1_ok and rep.a2_ok and rep.a3_ok and rep.zero_symmetry_ok
    assert rep.a3_worst_violation <= 0
    assert rep.generalized_ok and rep.quasi_ok


def test_zero_symmetry_violation_detected():
    m = np.array([[0.0, 0.0, 1.0],
                  [1.0, 0.0, 1.0],
                  [1.0, 1.0, 0.0]])
    rep = check_generalized_axioms(DistanceOracle(m), tol=1e-9)
    assert not rep.zero_symmetry_ok
    assert rep.zero_symmetry_witness == (0, 1)
    assert rep.a2_ok  # distinct points, only one direction vanishes


def test_triangle_violation_detected():
    m = euclidean_oracle().matrix.copy()
    m.setflags(write=True)
    m[0, 2] = 10.0
    rep = check_generalized_axioms(DistanceOracle(m), tol=1e-9)
    assert not rep.a3_ok
    assert rep.a3_worst_violation > 0
    i, j, k = rep.a3_witness
    assert m[i, k] > m[i, j] + m[j, k]


def test_reverse_involution_and_symmetric_fixed_point():
    D = euclidean_oracle()
    assert np.array_equal(reverse(D).matrix, D.matrix)      # symmetric input
    asym = DistanceOracle(np.array([[0.0, 1.0], [3.0, 0.0]]))
    assert np.array_equal(reverse(reverse(asym)).matrix, asym.matrix)
    assert reverse(asym).matrix[0, 1] == 3.0


def test_symmetrize_mean_and_reverse_invariance():
    asym = DistanceOracle(np.array([[0.0, 1.0], [3.0, 0.0]]))
    s = symmetrize(asym)
    assert s.matrix[0, 1] == s.matrix[1, 0] == 2.0
    assert np.array_equal(symmetrize(reverse(asym)).matrix, s.matrix)


def test_symmetrize_preserves_triangle_exhaustively():
    rng = np.random.default_rng(3)
    base = rng.uniform(0.5, 2.0, size=(6, 6))
    # shortest-path closure of a random positive matrix is a quasi-distance
    g = np.where(np.eye(6, dtype=bool), 0.0, base)
    for k, i, j in itertools.product(range(6), repeat=3):
        g[i, j] = min(g[i, j], g[i, k] + g[k, j])
    D = DistanceOracle(g)
    assert check_generalized_axioms(D, tol=1e-9).a3_ok
    S = symmetrize(D)
    for i, j, k in itertools.product(range(6), repeat=3):
        assert S.matrix[i, k] <= S.matrix[i, j] + S.matrix[j, k] + 1e-12


def test_ball_membership():
    D = euclidean_oracle()
    assert ball_membership(D, center=0, radius=0.5, direction="forward", probe=0)
    assert not ball_membership(D, center=0, radius=0.0, direction="forward", probe=0)
    assert ball_membership(D, center=0, radius=1.5, direction="forward", probe=1)
    assert not ball_membership(D, center=0, radius=1.0, direction="forward", probe=1)
    asym = DistanceOracle(np.array([[0.0, 1.0], [3.0, 0.0]]))
    assert ball_membership(asym, 0, 2.0, "forward", 1)
    assert not ball_membership(asym, 0, 2.0, "backward", 1)
    assert ball_membership(asym, 0, 2.5, "symmetric", 1)
    with pytest.raises(ValueError):
        ball_membership(D, 0, -1.0, "forward", 1)


def test_infinite_entries_and_csv_roundtrip(tmp_path):
    m = np.array([[0.0, math.inf], [1.0, 0.0]])
    D = DistanceOracle(m)
    assert D.d(0, 1).is_infinite
    rep = check_generalized_axioms(D, tol=1e-9)
    assert rep.a3_ok  # inf rows never violate a finite bound
    path = tmp_path / "m.csv"
    write_matrix_csv(path, m)
    back = read_matrix_csv(path)
    assert np.array_equal(back, m)
    assert "inf" in path.read_text()
