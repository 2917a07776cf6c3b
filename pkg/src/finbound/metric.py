"""Finite distance oracles and the generalized-distance axiom testers.

A DistanceOracle is a possibly-asymmetric distance matrix over a finite
point sample.  The axioms checked are those of a generalized distance:

  (a1)  d >= 0,
  (a2)  d(x,y) = d(y,x) = 0  iff  x = y,
  (a3)  the triangle inequality.

The remaining axiom of a generalized distance is a statement about
sequences and has no finite-matrix test; its finite-sample surrogate here
is zero-symmetry at tolerance (d(x,y) <= tol implies d(y,x) <= tol),
which a quasi-distance may genuinely violate.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .extreal import ExtendedNonNeg

Direction = Literal["forward", "backward", "symmetric"]


@dataclass
class DistanceOracle:
    """Asymmetric distances over n labelled points.

    matrix[i, j] is the distance from point i to point j; np.inf marks an
    unreachable target.  The matrix is treated as immutable once built.
    """

    matrix: np.ndarray
    labels: Sequence | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.isnan(m).any() or (m[np.isfinite(m)] < 0).any():
            raise ValueError("distances must lie in [0, inf]")
        self.matrix = m
        self.matrix.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def d(self, i: int, j: int) -> ExtendedNonNeg:
        return ExtendedNonNeg(self.matrix[i, j])


@dataclass
class AxiomReport:
    a1_ok: bool
    a2_ok: bool
    a3_ok: bool
    a3_worst_violation: float
    zero_symmetry_ok: bool
    zero_symmetry_witness: tuple[int, int] | None = None
    a3_witness: tuple[int, int, int] | None = None

    @property
    def generalized_ok(self) -> bool:
        return self.a1_ok and self.a2_ok and self.a3_ok and self.zero_symmetry_ok

    @property
    def quasi_ok(self) -> bool:
        return self.a1_ok and self.a2_ok and self.a3_ok


def _triangle_worst(m: np.ndarray, triples: Iterable[tuple[int, int, int]]):
    worst = -math.inf
    witness = None
    for i, j, k in triples:
        lhs = m[i, k]
        rhs = m[i, j] + m[j, k]
        if math.isinf(rhs):
            continue  # inf bound never violated
        gap = lhs - rhs  # > 0 means violation (inf lhs included)
        if gap > worst:
            worst = gap
            witness = (i, j, k)
    if worst == -math.inf:
        worst = 0.0
    return worst, witness


def check_generalized_axioms(D: DistanceOracle, tol: float,
                             slack: float = 0.0,
                             max_exhaustive: int = 150,
                             triple_samples: int = 200_000,
                             seed: int = 0) -> AxiomReport:
    """Check (a1)-(a3) and zero-symmetry at ``tol``.

    With the default ``slack = 0`` the first three axioms are checked
    exactly, which is what shortest-path matrices satisfy.  Matrices of
    estimated limits (the quasi-distance over a completion catalog) carry
    an estimation error and are checked with a positive ``slack``.

    Triangle triples are exhaustive up to ``max_exhaustive`` points and a
    seeded random sample beyond that (the report says which ordered triple
    is worst either way).
    """
    m = D.matrix
    n = D.n
    a1 = bool(not (m[np.isfinite(m)] < 0).any())

    diag = np.diag(m)
    a2 = bool((diag <= slack).all())
    both_zero = (m <= slack) & (m.T <= slack)
    np.fill_diagonal(both_zero, False)
    if both_zero.any():
        a2 = False

    if n <= max_exhaustive:
        triples = itertools.product(range(n), repeat=3)
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, n, size=(triple_samples, 3))
        triples = map(tuple, idx)
    worst, witness = _triangle_worst(m, triples)
    a3 = worst <= slack

    zs_ok = True
    zs_witness = None
    small = (m <= tol) & ~np.eye(n, dtype=bool)
    for i, j in zip(*np.nonzero(small)):
        if not m[j, i] <= tol:
            zs_ok = False
            zs_witness = (int(i), int(j))
            break

    return AxiomReport(a1_ok=a1, a2_ok=a2, a3_ok=a3,
                       a3_worst_violation=float(worst),
                       zero_symmetry_ok=zs_ok,
                       zero_symmetry_witness=zs_witness,
                       a3_witness=witness if not a3 else None)


def reverse(D: DistanceOracle) -> DistanceOracle:
    """The reversed oracle: d_rev(x, y) = d(y, x)."""
    return DistanceOracle(D.matrix.T.copy(), labels=D.labels)


def symmetrize(D: DistanceOracle) -> DistanceOracle:
    """The symmetrized distance (d(x,y) + d(y,x)) / 2."""
    return DistanceOracle((D.matrix + D.matrix.T) / 2.0, labels=D.labels)


def ball_membership(D: DistanceOracle, center: int, radius: float,
                    direction: Direction, probe: int) -> bool:
    """Strict open-ball membership.

    forward:   d(center, probe) < radius
    backward:  d(probe, center) < radius
    symmetric: (d(center, probe) + d(probe, center)) / 2 < radius
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    m = D.matrix
    if direction == "forward":
        val = m[center, probe]
    elif direction == "backward":
        val = m[probe, center]
    elif direction == "symmetric":
        val = (m[center, probe] + m[probe, center]) / 2.0
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return bool(val < radius)


def write_matrix_csv(path, matrix: np.ndarray, labels: Sequence | None = None):
    """CSV export: row = source, column = target, 'inf' for unreachable."""
    m = np.asarray(matrix, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["source\\target"] + [
            str(labels[j]) if labels is not None else str(j) for j in range(m.shape[1])]
        writer.writerow(header)
        for i in range(m.shape[0]):
            row = [str(labels[i]) if labels is not None else str(i)]
            row += ["inf" if math.isinf(v) else repr(float(v)) for v in m[i]]
            writer.writerow(row)


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = [[math.inf if cell == "inf" else float(cell) for cell in row[1:]]
            for row in rows[1:]]
    return np.asarray(data, dtype=float)
