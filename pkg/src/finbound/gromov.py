"""1-Lipschitz sampled functions modulo constants and their pointwise
limits: the function-space side of the completions.

Functions are stored as plain value arrays over the sample; a class is
the representative normalized to vanish at a base point.  The pointwise
limit of a sequence of classes is estimated per sample by a trimmed
median over the tail window: the escaping tail of a sequence drags a
transient spike of -d(., x_n) across nearby samples, and the trimmed
estimator removes exactly that kind of single-pass outlier while still
flagging genuinely oscillating samples as unstable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .graph import SampledSpace


@dataclass
class SampledFunction:
    values: np.ndarray
    base_id: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def normalized(self) -> "NormalizedClass":
        return normalize_at(self, self.base_id)


@dataclass
class NormalizedClass(SampledFunction):
    def __post_init__(self):
        super().__post_init__()
        if abs(self.values[self.base_id]) > 1e-12:
            raise ValueError("representative not normalized at the base point")


def normalize_at(f: SampledFunction, base_id: int) -> NormalizedClass:
    """The class representative vanishing at base_id (idempotent)."""
    return NormalizedClass(f.values - f.values[base_id], int(base_id))


def class_equal(f: SampledFunction, g: SampledFunction, tol: float,
                mask: np.ndarray | None = None) -> bool:
    """Same class: sup-norm of the normalized difference within tol."""
    diff = (f.values - f.values[f.base_id]) - (g.values - g.values[f.base_id])
    if mask is not None:
        diff = diff[mask]
    return bool(np.abs(diff).max() <= tol)


def is_lipschitz1(f: SampledFunction, space: SampledSpace, tol: float):
    """Edgewise audit of f(j) - f(i) <= d(i, j): returns (ok, worst slack,
    worst edge).  On a path-metric graph the edge audit is equivalent to
    the pairwise condition."""
    rows, cols, w = space.edge_arrays()
    slack = f.values[cols] - f.values[rows] - w
    worst = int(np.argmax(slack))
    return bool(slack[worst] <= tol), float(slack[worst]), \
        (int(rows[worst]), int(cols[worst]))


def d1_metric(f1: SampledFunction, f2: SampledFunction, base_id: int,
              space: SampledSpace) -> float:
    """sup |f1 - f2| / (1 + dtilde(x, base)^2), with the auxiliary metric
    dtilde = max(symmetrized graph distance, chart embedding distance).

    dtilde dominates the symmetrized distance; where an auxiliary metric
    dominating the asymmetric d itself is needed, use d1_metric_dominated.
    """
    dt = _dtilde(space, base_id)
    return float((np.abs(f1.values - f2.values) / (1.0 + dt ** 2)).max())


def d1_metric_dominated(f1: SampledFunction, f2: SampledFunction, base_id: int,
                        space: SampledSpace) -> float:
    """Variant whose auxiliary metric additionally dominates d and d_rev
    (dtilde' = dtilde + d + d_rev)."""
    dt = _dtilde(space, base_id)
    fwd = space.dist_from([base_id])[0]
    bwd = space.dist_to([base_id])[0]
    dt = dt + np.where(np.isfinite(fwd), fwd, 0.0) + np.where(np.isfinite(bwd), bwd, 0.0)
    return float((np.abs(f1.values - f2.values) / (1.0 + dt ** 2)).max())


def _dtilde(space: SampledSpace, base_id: int) -> np.ndarray:
    fwd = space.dist_from([base_id])[0]
    bwd = space.dist_to([base_id])[0]
    sym = (fwd + bwd) / 2.0
    xy = space.xy()
    eu = np.linalg.norm(xy - xy[base_id], axis=1)
    sym = np.where(np.isfinite(sym), sym, eu)
    return np.maximum(sym, eu)


@dataclass
class PointwiseLimit:
    verdict: Literal["limit", "diverges", "no-limit"]
    limit: NormalizedClass | None
    stable_mask: np.ndarray | None
    divergence_sign: int = 0
    worst_sample: int | None = None

    @property
    def stable_fraction(self) -> float:
        return float(self.stable_mask.mean()) if self.stable_mask is not None else 0.0


def _trimmed_window_stats(tail: np.ndarray):
    """Per-sample median and trimmed spread over the window axis."""
    s = np.sort(tail, axis=0)
    k = tail.shape[0]
    lo = max(1, k // 4)
    hi = k - lo
    core = s[lo:hi]
    med = np.median(tail, axis=0)
    spread = core.max(axis=0) - core.min(axis=0)
    return med, spread


def pointwise_limit(seq: Sequence[NormalizedClass], tol: float,
                    min_stable_fraction: float = 0.6,
                    envelope: np.ndarray | float | None = None) -> PointwiseLimit:
    """Tail-window pointwise limit of normalized classes.

    Per sample the window is either settled (trimmed spread within tol),
    still trending monotonically (an escaping tail that has not passed
    the sample yet), or oscillating.  The result carries the mask of
    settled samples; comparisons downstream are made on that mask.

    "diverges" requires a trending sample beyond the ``envelope`` bound
    (default 1/tol): normalized 1-Lipschitz families are confined to the
    distance envelope of the base point, so exceeding it means genuine
    escape to +-infinity rather than slow convergence.  "no-limit" is
    returned when too few samples settle or an oscillating sample
    dominates; the worst sample is reported either way.
    """
    if len(seq) < 8:
        raise ValueError("need at least 8 terms")
    base = seq[0].base_id
    vals = np.stack([f.values for f in seq])
    w = max(4, math.ceil(len(seq) / 4))
    tail = vals[-w:]

    env = 1.0 / max(tol, 1e-12) if envelope is None else envelope
    diffs = np.diff(tail, axis=0)
    trend_up = np.all(diffs > tol, axis=0)
    trend_dn = np.all(diffs < -tol, axis=0)
    div_up = trend_up & (tail[-1] > +np.asarray(env))
    div_dn = trend_dn & (tail[-1] < -np.asarray(env))
    if div_up.any() or div_dn.any():
        sign = 1 if div_up.any() else -1
        return PointwiseLimit("diverges", None, None, divergence_sign=sign)

    med, spread = _trimmed_window_stats(tail)
    stable = spread <= tol
    stable[base] = True
    if stable.mean() < min_stable_fraction:
        oscillating = ~stable & ~(trend_up | trend_dn)
        pool = spread * np.where(oscillating, 1.0, 0.0)
        worst = int(np.argmax(pool if oscillating.any() else spread))
        return PointwiseLimit("no-limit", None, stable, worst_sample=worst)
    limit = NormalizedClass(med - med[base], base)
    return PointwiseLimit("limit", limit, stable)


def lipschitz_envelope(space: SampledSpace, base_id: int,
                       slack: float = 2.0) -> np.ndarray:
    """Bound on |f - f(base)| for 1-Lipschitz f: max of both one-way
    distances to the base, plus slack."""
    fwd = space.dist_from([base_id])[0]
    bwd = space.dist_to([base_id])[0]
    out = np.maximum(np.where(np.isfinite(fwd), fwd, 0.0),
                     np.where(np.isfinite(bwd), bwd, 0.0)) + slack
    return out


@dataclass
class GromovTag:
    tag: Literal["M-point", "cauchy_gromov", "proper_gromov"]
    matched: str | None = None      # catalog class name, or sample id repr
    residual: bool = False


def gromov_classify(limit: PointwiseLimit, catalog, witness_radii: Sequence[float],
                    tol: float) -> GromovTag:
    """Classify a pointwise limit against a completion catalog.

    witness_radii: sup distance of the witness tail from the base point,
    one value per truncation; growth across truncations marks the witness
    unbounded (proper Gromov point), boundedness marks it Cauchy-Gromov.
    Residual = bounded but matching no catalog class and no sample point.
    """
    if limit.verdict != "limit":
        raise ValueError("no pointwise limit to classify")
    space = catalog.space
    base = limit.limit.base_id
    radii = list(witness_radii)
    if len(radii) >= 2:
        bounded = radii[-1] - radii[0] <= 0.05 * max(radii[-1], 1.0) + tol
    else:
        bounded = True

    candidates: list[tuple[float, GromovTag]] = []
    for cls in catalog.classes:
        g = minus_dist_to_class(space, cls, base)
        e = _masked_sup(limit, g)
        candidates.append((e, GromovTag("cauchy_gromov", matched=cls.name)))
    err = _interior_error(limit, space)
    if err is not None:
        candidates.append((err[0], GromovTag("M-point", matched=str(err[1]))))
    best_err, best = min(candidates, key=lambda t: t[0]) if candidates \
        else (math.inf, None)
    if not bounded:
        return GromovTag("proper_gromov")
    if best is not None and best_err <= tol:
        return best
    return GromovTag("cauchy_gromov", residual=True)


def _masked_sup(limit: PointwiseLimit, g: SampledFunction) -> float:
    f = limit.limit
    diff = (f.values - f.values[f.base_id]) - (g.values - g.values[f.base_id])
    return float(np.abs(diff[limit.stable_mask]).max())


def _interior_error(limit: PointwiseLimit, space: SampledSpace):
    """Sup error against -d(., x) for the natural sample candidate x, the
    maximizer of the limit; None when that distance is not finite."""
    vals = limit.limit.values
    cand = int(np.argmax(np.where(limit.stable_mask, vals, -np.inf)))
    g = SampledFunction(-space.dist_to([cand])[0], limit.limit.base_id)
    if not np.isfinite(g.values).all():
        return None
    return _masked_sup(limit, g), cand


def minus_dist_to_class(space: SampledSpace, cls, base_id: int) -> NormalizedClass:
    """Normalized -d(., class), estimated at the deepest representative."""
    last = cls.representative.ids[-1]
    d = space.dist_to([last])[0]
    return NormalizedClass(-(d - d[base_id]), int(base_id))


def write_function_csv(path, space: SampledSpace, f: SampledFunction):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        dim = space.points.shape[1]
        writer.writerow(["id"] + [f"coord{k}" for k in range(dim)] + ["value"])
        for i in range(space.n):
            writer.writerow([i] + [repr(float(c)) for c in space.points[i]]
                            + [repr(float(f.values[i]))])
