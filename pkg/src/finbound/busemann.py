"""Busemann functions of speed-bounded curves, the t - d(., x) family,
and its strict order.

A forward curve c with parameter values s_k evaluates to

    b(x) = sup_k (s_k - d(x, c(s_k))),

which is increasing in k up to the discretization quantum, so the sup is
taken over a tail of samples.  Backward curves mirror the construction
through the reversed distance, with the sign conventions that make the
pair fit the spacetime picture:  b_minus(x) = lim (-s + d(c(s), x)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .completion import CauchyClass, CompletionCatalog
from .graph import SampledSpace
from .gromov import SampledFunction

INF = math.inf


class SpeedBoundError(ValueError):
    """Curve samples violate the unit speed bound (or s is not increasing)."""


@dataclass(frozen=True)
class SpeedBoundedCurve:
    s: tuple                       # strictly increasing parameters
    ids: tuple                     # point id at each parameter
    omega_end: float               # declared parameter limit (may be inf)
    direction: Literal["forward", "backward"] = "forward"

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(float(v) for v in self.s))
        object.__setattr__(self, "ids", tuple(int(i) for i in self.ids))
        if len(self.s) != len(self.ids) or len(self.s) < 2:
            raise SpeedBoundError("need matching s/ids with >= 2 samples")
        if any(b <= a for a, b in zip(self.s, self.s[1:])):
            raise SpeedBoundError("parameter values must be strictly increasing")

    def __len__(self):
        return len(self.ids)

    def tail(self, count: int):
        k = min(count, len(self.ids))
        return self.s[-k:], self.ids[-k:]


def curve_from_ids(space: SampledSpace, ids: Sequence[int],
                   direction: str = "forward",
                   omega_end: float | None = None,
                   slack: float = 1e-6) -> SpeedBoundedCurve:
    """Arc-parametrize a node path: s_k = cumulative edge length * (1+slack).

    Consecutive duplicate ids are dropped.  Backward curves accumulate the
    reversed edge lengths.  When omega_end is None the curve is declared
    to end at its last parameter (finite total length).
    """
    clean = []
    for i in ids:
        if not clean or clean[-1] != int(i):
            clean.append(int(i))
    g = space.csgraph
    s = [0.0]
    for a, b in zip(clean, clean[1:]):
        w = g[a, b] if direction == "forward" else g[b, a]
        if w <= 0:
            w = float(space.dist_from([a])[0][b]) if direction == "forward" \
                else float(space.dist_from([b])[0][a])
        s.append(s[-1] + float(w) * (1.0 + slack))
    end = float(omega_end) if omega_end is not None else s[-1]
    return SpeedBoundedCurve(tuple(s), tuple(clean), end, direction)


def curve_from_annotation(space: SampledSpace, name: str) -> SpeedBoundedCurve:
    spec = space.annotations["curves"][name]
    if spec.get("s") is not None:
        end = spec.get("omega_end")
        return SpeedBoundedCurve(tuple(spec["s"]), tuple(spec["ids"]),
                                 float(end) if end is not None else spec["s"][-1],
                                 spec.get("direction", "forward"))
    return curve_from_ids(space, spec["ids"], direction=spec.get("direction", "forward"),
                          omega_end=spec.get("omega_end"))


@dataclass
class BusemannFunction:
    kind: Literal["cauchy_type", "properly_busemann", "infinite"]
    values: np.ndarray | None       # None iff kind == "infinite"
    curve: SpeedBoundedCurve | None
    direction: Literal["forward", "backward"] = "forward"
    omega: float | None = None      # parameter limit when finite kind
    class_name: str | None = None   # set by classify_busemann

    def function(self, base_id: int) -> SampledFunction:
        if self.values is None:
            raise ValueError("function is identically infinite")
        return SampledFunction(self.values, base_id)


def _speed_audit(curve: SpeedBoundedCurve, space: SampledSpace, tol: float):
    s, ids = curve.s, curve.ids
    step = min(len(ids) - 1, 24)
    picks = np.unique(np.linspace(0, len(ids) - 1, step + 1).astype(int))
    sub = [ids[k] for k in picks]
    if curve.direction == "forward":
        D = space.dist_from(sub)            # D[a] = d(c_a, .)
    else:
        D = space.dist_to(sub)              # D[a] = d(., c_a)
    worst = -math.inf
    for a in range(len(picks) - 1):
        k, l = picks[a], picks[a + 1]
        if curve.direction == "forward":
            dd = D[a][ids[l]]               # d(c_k, c_l)
        else:
            dd = D[a][ids[l]]               # d(c_l, c_k) = d_rev(c_k, c_l)
        worst = max(worst, dd - (s[l] - s[k]))
    if worst > tol:
        raise SpeedBoundError(f"speed bound violated by {worst:.3g}")


def busemann_eval(curve: SpeedBoundedCurve, space: SampledSpace,
                  tail: int = 12, speed_tol: float | None = None) -> BusemannFunction:
    """Evaluate the Busemann function of a curve over the whole sample.

    The sup over parameters is taken on a tail of curve samples.  A curve
    with declared omega_end = inf whose values still grow like s at the
    tail is flagged infinite (its class is the apex, not a function).
    """
    speed_tol = 2 * space.h if speed_tol is None else speed_tol
    _speed_audit(curve, space, speed_tol)
    s_tail, id_tail = curve.tail(tail)
    s_arr = np.asarray(s_tail)
    if curve.direction == "forward":
        D = space.dist_to(list(id_tail))            # (k, n): d(., c_k)
        vals = s_arr[:, None] - D
    else:
        D = space.dist_from(list(id_tail))          # (k, n): d(c_k, .)
        vals = -s_arr[:, None] + D
    if math.isinf(curve.omega_end):
        # values still growing like s across the whole sample mean b = +-inf
        # (apex); the quantile ignores the zone the moving tip has not
        # passed, where values rise even for a finite horofunction
        agg = vals.max(axis=0) if curve.direction == "forward" else vals.min(axis=0)
        span = s_arr[-1] - s_arr[0]
        probe = vals[-1] - vals[0]
        growth = float(np.quantile(probe if curve.direction == "forward"
                                   else -probe, 0.25))
        if growth > 0.5 * span:
            return BusemannFunction("infinite", None, curve, curve.direction)
        return BusemannFunction("properly_busemann", agg, curve, curve.direction,
                                omega=INF)
    agg = vals.max(axis=0) if curve.direction == "forward" else vals.min(axis=0)
    return BusemannFunction("cauchy_type", agg, curve, curve.direction,
                            omega=float(curve.omega_end))


def monotonicity_check(curve: SpeedBoundedCurve, x: int,
                       space: SampledSpace, samples: int = 24) -> float:
    """Worst decrease of k -> s_k - d(x, c(s_k)) over consecutive sampled
    parameters (forward curves; mirrored for backward).  Nonpositive up to
    the discretization quantum."""
    picks = np.unique(np.linspace(0, len(curve.ids) - 1, samples).astype(int))
    ids = [curve.ids[k] for k in picks]
    s = np.asarray([curve.s[k] for k in picks])
    if curve.direction == "forward":
        vals = s - space.dist_to(ids)[:, x]          # increasing in k
        drops = vals[:-1] - vals[1:]
    else:
        vals = -s + space.dist_from(ids)[:, x]       # decreasing in k
        drops = vals[1:] - vals[:-1]
    return float(drops.max())


def dp_function(t: float, target, space: SampledSpace, sign: str = "+",
                tol: float = 0.01) -> SampledFunction:
    """The function t -+ d^{sign}(., x) for a sample id or CauchyClass.

    sign "+": t - d(., x) (a forward Busemann function of finite type);
    sign "-": t + d_rev(., x) = t + d(x, .).
    """
    if isinstance(target, CauchyClass):
        last = target.representative.ids[-1]
        d = space.dist_to([last])[0] if sign == "+" else space.dist_from([last])[0]
    else:
        x = int(target)
        d = space.dist_to([x])[0] if sign == "+" else space.dist_from([x])[0]
    base = space.annotations.get("base_id", 0)
    if sign == "+":
        return SampledFunction(t - d, base)
    return SampledFunction(t + d, base)


def dp_strict_order(p1: tuple, p2: tuple, space: SampledSpace,
                    tol: float = 0.0) -> bool:
    """Strict pointwise order of the t - d(., x) family:
    d_p1 < d_p2 everywhere iff d(x1, x2) < t2 - t1."""
    t1, x1 = p1
    t2, x2 = p2
    d12 = float(space.dist_from([int(x1)])[0][int(x2)])
    return d12 < (t2 - t1) - tol


def classify_busemann(b: BusemannFunction, catalog: CompletionCatalog,
                      tol: float) -> BusemannFunction:
    """Tag a finite Busemann function as cauchy_type over a catalog class
    (values match omega - d(., class) within tol) or properly_busemann.

    A finite declared end with no matching class is an error: the catalog
    does not cover the space's boundary.
    """
    if b.values is None:
        return b
    space = catalog.space
    best_name, best_err, best_omega = None, math.inf, None
    for cls in catalog.classes:
        last = cls.representative.ids[-1]
        d = space.dist_to([last])[0] if b.direction == "forward" \
            else space.dist_from([last])[0]
        resid = b.values + d if b.direction == "forward" else b.values - d
        finite = np.isfinite(resid)
        if not finite.all():
            continue
        err = float(resid.max() - resid.min())
        if err < best_err:
            best_name, best_err = cls.name, err
            best_omega = float(np.median(resid))
    if best_err <= tol:
        b.kind = "cauchy_type"
        b.class_name = best_name
        b.omega = best_omega
        return b
    if b.omega is not None and math.isinf(b.omega):
        b.kind = "properly_busemann"
        return b
    raise ValueError(f"finite end declared but no catalog class matches "
                     f"(best {best_name!r} at error {best_err:.3g} > tol {tol})")
