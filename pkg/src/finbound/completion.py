"""Cauchy classification, the equivalence of sequences, and the
quasi-distance on classes.

All limits are finite-truncation estimates: a limit "exists at tolerance
tol" when the relevant tail window has stabilized, and an "infinite"
verdict means the value exceeds a truncation-dependent threshold and
keeps growing across truncations.  Functions report diagnostics rather
than guessing beyond the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .extreal import INF, ExtendedNonNeg
from .graph import SampledSpace

Kind = Literal["interior", "forward-boundary", "backward-boundary",
               "symmetrized-boundary"]

DEFAULT_SCHEDULE = (1.0, 0.3, 0.1)


class TruncationError(ValueError):
    """The sequence is too short to decide the requested tolerance."""


@dataclass(frozen=True)
class PointSequence:
    ids: tuple
    source: str = ""

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        if len(self.ids) < 8:
            raise TruncationError("need at least 8 terms for any verdict")

    @property
    def truncation(self) -> int:
        return len(self.ids)

    def tail(self, count: int) -> tuple:
        return self.ids[-count:]

    def window(self) -> int:
        return max(4, math.ceil(len(self.ids) / 4))


@dataclass
class CauchyVerdict:
    passed: bool
    epsilon_schedule: tuple
    witnesses: dict            # eps -> first violating (n, m) index pair
    n0_used: dict              # eps -> n0 that certified the bound
    flavor: str = "forward"


@dataclass
class CauchyClass:
    representative: PointSequence
    kind: Kind
    limit_id: int | None = None
    name: str = ""


@dataclass
class DoubleLimit:
    value: ExtendedNonNeg
    trend: Literal["stable", "increasing", "decreasing"]
    window: int
    inner_stable: bool

    @property
    def estimate(self) -> float:
        return self.value.value


def _pair_matrix(space: SampledSpace, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
    return space.dist_from(list(a))[:, list(b)]


def is_forward_cauchy(sigma: PointSequence, space: SampledSpace,
                      schedule: Sequence[float] = DEFAULT_SCHEDULE,
                      reverse: bool = False) -> CauchyVerdict:
    """Ordered Cauchy test: for each eps, search n0 <= N/2 such that
    d(x_n, x_m) < eps whenever n0 <= n <= m <= N.

    ``reverse`` runs the test for the reversed distance (backward Cauchy).
    """
    ids = sigma.ids
    N = len(ids)
    M = _pair_matrix(space, ids, ids)
    if reverse:
        M = M.T
    half = N // 2
    witnesses, n0_used = {}, {}
    ok_all = True
    for eps in schedule:
        found = None
        for n0 in range(half):
            sub = M[n0:, n0:]
            bad = np.triu(sub >= eps)
            if not bad.any():
                found = n0
                break
        if found is None:
            ok_all = False
            sub = M[half - 1:, half - 1:] if half >= 1 else M
            bad = np.argwhere(np.triu(sub >= eps))
            if len(bad):
                n, m = bad[0]
                witnesses[eps] = (int(n + max(half - 1, 0)), int(m + max(half - 1, 0)))
        else:
            n0_used[eps] = found
    verdict = CauchyVerdict(ok_all, tuple(schedule), witnesses, n0_used,
                            flavor="backward" if reverse else "forward")
    _check_decidable(verdict, M, N)
    return verdict


def _check_decidable(verdict: CauchyVerdict, M: np.ndarray, N: int):
    """Raise when a failure hinges only on boundary-index pairs, i.e. the
    truncation is too small to produce a stable witness."""
    margin = max(1, N // 8)
    for eps, (n, m) in verdict.witnesses.items():
        if n >= N - margin or m >= N - margin:
            full = np.argwhere(np.triu(M >= eps))
            interior = [p for p in full if p[0] < N - margin and p[1] < N - margin]
            if not interior:
                raise TruncationError(
                    f"violations of eps={eps} occur only at the tail boundary; "
                    "extend the truncation")


def is_alternative_cauchy(sigma: PointSequence, space: SampledSpace,
                          schedule: Sequence[float] = DEFAULT_SCHEDULE) -> CauchyVerdict:
    """Relaxed test: for each eps there is n0 such that every n >= n0 admits
    m0(n) with d(x_n, x_m) < eps for all m0(n) <= m <= N.

    A tail margin is reserved: m0(n) beyond it means the truncation cannot
    certify the bound.
    """
    ids = sigma.ids
    N = len(ids)
    M = _pair_matrix(space, ids, ids)
    margin = max(1, N // 8)
    cap = N - margin             # a certified suffix needs margin terms
    tested = cap - 2             # rows nearer the end cannot host one
    witnesses, n0_used = {}, {}
    ok_all = True
    for eps in schedule:
        ok_rows = np.zeros(tested, dtype=bool)
        for n in range(tested):
            row = M[n] < eps
            good_from = N
            for m in range(N - 1, n - 1, -1):
                if row[m]:
                    good_from = m
                else:
                    break
            ok_rows[n] = good_from <= cap
        n0 = None
        for cand in range(min(N // 2, tested)):
            if ok_rows[cand:].all():
                n0 = cand
                break
        if n0 is None:
            ok_all = False
            bad_n = int(np.argwhere(~ok_rows)[-1][0])
            bad_m = int(np.argwhere(M[bad_n] >= eps)[-1][0])
            witnesses[eps] = (bad_n, bad_m)
        else:
            n0_used[eps] = n0
    return CauchyVerdict(ok_all, tuple(schedule), witnesses, n0_used,
                         flavor="alternative")


def _window_estimate(values: np.ndarray, window: int, tol: float):
    """(estimate, trend, stable) from the last ``window`` entries.

    The estimate is the last entry when the window has not stabilized,
    which is the honest finite-truncation reading of a monotone tail.
    """
    tail = values[-window:]
    finite = np.isfinite(tail)
    if not finite.all():
        return math.inf, "increasing", False
    spread = tail.max() - tail.min()
    stable = spread <= tol
    if stable:
        trend = "stable"
        est = float(np.median(tail))
    else:
        first, last = tail[0], tail[-1]
        trend = "increasing" if last >= first else "decreasing"
        est = float(last)
    return est, trend, stable


def double_limit(sigma_a: PointSequence, sigma_b: PointSequence,
                 space: SampledSpace, tol: float = 0.01) -> DoubleLimit:
    """Estimate lim_n lim_m d(a_n, b_m) by nested tail stabilization."""
    A, B = sigma_a.ids, sigma_b.ids
    M = _pair_matrix(space, A, B)
    w_in = max(4, math.ceil(len(B) / 4))
    w_out = max(4, math.ceil(len(A) / 4))
    inner = np.empty(len(A))
    inner_stable = True
    for n in range(len(A)):
        est, _, stable = _window_estimate(M[n], w_in, tol)
        inner[n] = est
        if n >= len(A) - w_out:
            inner_stable = inner_stable and stable
    est, trend, _ = _window_estimate(inner, w_out, tol)
    value = INF if math.isinf(est) else ExtendedNonNeg(max(est, 0.0))
    return DoubleLimit(value=value, trend=trend, window=w_out,
                       inner_stable=inner_stable)


def are_equivalent(sigma_a: PointSequence, sigma_b: PointSequence,
                   space: SampledSpace, tol: float) -> bool:
    """sigma_a ~ sigma_b: both double limits vanish at tolerance."""
    ab = double_limit(sigma_a, sigma_b, space, tol)
    ba = double_limit(sigma_b, sigma_a, space, tol)
    return ab.estimate <= tol and ba.estimate <= tol


def extract_cauchy_subsequence(sigma: PointSequence, space: SampledSpace,
                               k_start: int = 1) -> PointSequence:
    """Constructive extraction of an ordered-Cauchy subsequence from an
    alternative-Cauchy sequence, along the eps = 1/k schedule: pick
    n_k >= m(n_{k-1}) and m(n_k) with d(x_{n_k}, x_m) < 1/k for all
    m >= m(n_k) up to the truncation.
    """
    verdict = is_alternative_cauchy(sigma, space)
    if not verdict.passed:
        raise ValueError("input is not alternative-Cauchy at the default schedule")
    ids = sigma.ids
    N = len(ids)
    M = _pair_matrix(space, ids, ids)
    margin = max(1, N // 8)
    cap = N - margin
    tested = cap - 2
    target_terms = max(8, min(24, tested // 2))

    def first_valid(lo: int, eps: float):
        for n in range(lo, tested):
            row = M[n]
            good_from = N
            for m in range(N - 1, n - 1, -1):
                if row[m] < eps:
                    good_from = m
                else:
                    break
            if good_from <= cap:
                return n, max(good_from, n + 1)
        return None

    chosen = []
    lower = 0
    k = k_start
    while True:
        eps = 1.0 / k
        # spread picks across the available range so the extracted tail
        # reaches as deep as the original sequence
        spread = math.ceil((len(chosen) + 1) * tested / (target_terms + 1))
        pick = first_valid(max(lower, spread), eps) or first_valid(lower, eps)
        if pick is None:
            break
        n_k, m_k = pick
        chosen.append(n_k)
        lower = m_k
        k += 1
    if len(chosen) < 8:
        raise TruncationError("could not extract 8 subsequence terms; "
                              "extend the truncation")
    return PointSequence(tuple(ids[i] for i in chosen),
                         source=f"{sigma.source}/extracted")


def classify_boundary_point(sigma: PointSequence, space: SampledSpace,
                            tol: float | None = None,
                            schedule: Sequence[float] = DEFAULT_SCHEDULE) -> CauchyClass:
    """Interior point, or forward/backward/symmetrized boundary class.

    Interior wins when the tail window has metrically settled onto one
    sample (finite samples cannot host true boundary points); the default
    settling tolerance is half the grid step.
    """
    tol = space.h / 2 if tol is None else tol
    w = sigma.window()
    tail = list(sigma.tail(w))
    q = tail[-1]
    to_q = space.dist_to([q])[0, tail]       # d(tail_i, q)
    from_q = space.dist_from([q])[0, tail]   # d(q, tail_i)
    sym = (to_q + from_q) / 2.0
    if np.isfinite(sym).all() and sym.max() <= tol:
        return CauchyClass(sigma, "interior", limit_id=int(q), name=sigma.source)
    fwd = is_forward_cauchy(sigma, space, schedule)
    bwd = is_forward_cauchy(sigma, space, schedule, reverse=True)
    if fwd.passed and bwd.passed:
        kind: Kind = "symmetrized-boundary"
    elif fwd.passed:
        kind = "forward-boundary"
    elif bwd.passed:
        kind = "backward-boundary"
    else:
        raise ValueError("sequence is neither forward nor backward Cauchy "
                         "at the given schedule")
    return CauchyClass(sigma, kind, name=sigma.source)


def quasi_distance(a: CauchyClass, b: CauchyClass, space: SampledSpace,
                   tol: float = 0.01) -> DoubleLimit:
    """d_Q between classes: the double limit of their representatives.

    Interior classes reduce to the underlying graph distance through
    their (eventually constant) representatives.
    """
    return double_limit(a.representative, b.representative, space, tol)


def point_to_class(point_id: int, cls: CauchyClass, space: SampledSpace,
                   tol: float = 0.01):
    """lim_m d(x, b_m) (finite for forward classes)."""
    vals = space.dist_from([point_id])[0, list(cls.representative.ids)]
    w = cls.representative.window()
    est, trend, stable = _window_estimate(vals, w, tol)
    return DoubleLimit(INF if math.isinf(est) else ExtendedNonNeg(max(est, 0.0)),
                       trend, w, stable)


def class_to_point(cls: CauchyClass, point_id: int, space: SampledSpace,
                   tol: float = 0.01):
    """lim_n d(a_n, x) in [0, inf]."""
    vals = space.dist_to([point_id])[0, list(cls.representative.ids)]
    w = cls.representative.window()
    est, trend, stable = _window_estimate(vals, w, tol)
    return DoubleLimit(INF if math.isinf(est) else ExtendedNonNeg(max(est, 0.0)),
                       trend, w, stable)


@dataclass
class CompletionCatalog:
    space: SampledSpace
    classes: list[CauchyClass]
    interior_ids: list[int]
    dq: np.ndarray             # (k + p) x (k + p), classes then interior points
    tol: float
    unclassified: list[str] = field(default_factory=list)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.classes]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def symmetrized_names(self) -> list[str]:
        return [c.name for c in self.classes if c.kind == "symmetrized-boundary"]


def build_catalog(space: SampledSpace, tol: float = 0.01,
                  sequence_names: Sequence[str] | None = None,
                  interior_ids: Sequence[int] | None = None,
                  dedupe: bool = True,
                  schedule: Sequence[float] = DEFAULT_SCHEDULE) -> CompletionCatalog:
    """Classify the annotated sequences of a space and assemble the
    quasi-distance matrix over classes and probe interior points."""
    seqs = space.annotations.get("sequences", {})
    names = list(sequence_names) if sequence_names is not None else sorted(seqs)
    classes: list[CauchyClass] = []
    unclassified: list[str] = []
    for name in names:
        sigma = PointSequence(tuple(seqs[name]), source=name)
        try:
            cls = classify_boundary_point(sigma, space, schedule=schedule)
        except ValueError:
            # annotated witness sequences need not be Cauchy at all; they
            # are simply not classes
            unclassified.append(name)
            continue
        cls.name = name
        if dedupe:
            dup = next((c for c in classes
                        if c.kind == cls.kind and
                        are_equivalent(c.representative, sigma, space, 3 * tol)),
                       None)
            if dup is not None:
                continue
        classes.append(cls)
    probes = list(interior_ids) if interior_ids is not None else \
        [space.annotations.get("probe_id", 0)]
    k, p = len(classes), len(probes)
    dq = np.zeros((k + p, k + p))
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            if i == j:
                continue
            dq[i, j] = quasi_distance(a, b, space, tol).estimate
        for j, x in enumerate(probes):
            dq[i, k + j] = class_to_point(a, x, space, tol).estimate
    for i, x in enumerate(probes):
        for j, b in enumerate(classes):
            dq[k + i, j] = point_to_class(x, b, space, tol).estimate
    if p:
        sub = space.dist_from(probes)[:, probes]
        dq[k:, k:] = sub
    return CompletionCatalog(space=space, classes=classes,
                             interior_ids=[int(x) for x in probes],
                             dq=dq, tol=tol, unclassified=unclassified)


@dataclass
class PairingVerdict:
    name: str
    values: list[float]
    evenly_pairing: bool
    threshold: list[float]


def evenly_pairing_check(catalogs: Sequence[tuple[float, CompletionCatalog]],
                         probe_coords) -> list[PairingVerdict]:
    """Across truncations T, flag each forward class outside the
    symmetrized boundary by whether d_Q(class, probe) clears T/4 and keeps
    growing (evenly pairing) or stabilizes finite."""
    if len(catalogs) < 2:
        raise ValueError("need catalogs at >= 2 truncations")
    catalogs = sorted(catalogs, key=lambda tc: tc[0])
    names = [c.name for c in catalogs[0][1].classes
             if c.kind == "forward-boundary"]
    out = []
    for name in names:
        vals, thresholds = [], []
        for T, cat in catalogs:
            cls = cat.classes[cat.index(name)]
            probe = cat.space.nearest_id(probe_coords)
            vals.append(class_to_point(cls, probe, cat.space, cat.tol).estimate)
            thresholds.append(T / 4.0)
        spans = [t2 - t1 for (t1, _), (t2, _) in zip(catalogs, catalogs[1:])]
        growing = all(b - a > 0.05 * span
                      for (a, b), span in zip(zip(vals, vals[1:]), spans))
        clears = all(v > th for v, th in zip(vals, thresholds))
        out.append(PairingVerdict(name=name, values=vals,
                                  evenly_pairing=bool(growing and clears),
                                  threshold=thresholds))
    return out
