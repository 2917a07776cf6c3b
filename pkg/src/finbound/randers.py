"""Randers-type norms and numerical segment lengths.

Two input conventions are supported for a metric built from a Riemannian
part g0 and a one-form omega:

``fermat`` (default)
    F(v) = sqrt(g0(v,v) + omega(v)^2) + omega(v).
    This is the form the stationary-spacetime construction produces; it
    is positive for every v != 0 whenever g0 is positive definite, with
    no size restriction on omega.

``classic``
    F(v) = sqrt(g0(v,v)) + omega(v), the textbook Randers form, which is
    positive iff the g0-norm of omega is < 1.  Building a space whose
    omega violates that bound is an error.

Reversing either form is exactly omega -> -omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .fieldexpr import FieldExpr, constant_field, parse_field

Form = Literal["fermat", "classic"]

CHART_COORDS = {
    "cartesian": ("x", "y"),
    "polar": ("r", "theta"),
    "line": ("x",),
}


class PositivityError(ValueError):
    """The metric data fails to define a positive Finsler norm."""


def _as_expr(e) -> FieldExpr:
    if isinstance(e, FieldExpr):
        return e
    if isinstance(e, (int, float)):
        return constant_field(float(e))
    return parse_field(str(e))


@dataclass(frozen=True)
class RandersData:
    """Coefficient fields of a Randers-type metric on a chart.

    g0 is given by its (symmetric) component fields, omega by its covector
    components, both in chart coordinates.
    """

    g0: tuple          # ((g11,), ) in 1D or ((g11, g12), (g12, g22)) in 2D
    omega: tuple       # (w1,) or (w1, w2)
    chart: str = "cartesian"
    form: Form = "fermat"

    @property
    def dim(self) -> int:
        return len(self.omega)

    @staticmethod
    def from_fields(g0, omega, chart="cartesian", form="fermat") -> "RandersData":
        if isinstance(g0, (list, tuple)) and g0 and isinstance(g0[0], (list, tuple)):
            g0_rows = tuple(tuple(_as_expr(e) for e in row) for row in g0)
        else:
            g0_rows = ((_as_expr(g0),),)
        om = tuple(_as_expr(e) for e in (omega if isinstance(omega, (list, tuple)) else [omega]))
        dim = len(om)
        if len(g0_rows) != dim or any(len(r) != dim for r in g0_rows):
            raise ValueError("g0 shape does not match omega dimension")
        if chart not in CHART_COORDS or len(CHART_COORDS[chart]) != dim:
            raise ValueError(f"chart {chart!r} does not fit dimension {dim}")
        if form not in ("fermat", "classic"):
            raise ValueError(f"unknown form {form!r}")
        return RandersData(g0_rows, om, chart, form)

    @staticmethod
    def euclidean(dim=2, omega=None, chart=None, form="fermat") -> "RandersData":
        chart = chart or ("cartesian" if dim == 2 else "line")
        if dim == 2:
            g0 = [[1.0, 0.0], [0.0, 1.0]]
            om = omega if omega is not None else [0.0, 0.0]
        else:
            g0 = 1.0
            om = omega if omega is not None else [0.0]
        return RandersData.from_fields(g0, om, chart=chart, form=form)

    def _env(self, pts: np.ndarray) -> dict:
        names = CHART_COORDS[self.chart]
        return {name: pts[..., k] for k, name in enumerate(names)}

    def coefficient_arrays(self, pts: np.ndarray):
        """(g0 component arrays, omega component arrays) at points (..., dim)."""
        env = self._env(pts)
        shape = pts.shape[:-1]
        g = [[np.broadcast_to(self.g0[i][j].evaluate_array(env), shape)
              for j in range(self.dim)] for i in range(self.dim)]
        w = [np.broadcast_to(self.omega[k].evaluate_array(env), shape)
             for k in range(self.dim)]
        return g, w

    def validate_points(self, pts: np.ndarray):
        """Check finiteness, positive-definiteness of g0, and (classic form)
        the sub-unit omega bound, at every given point."""
        g, w = self.coefficient_arrays(pts)
        for row in g:
            for comp in row:
                if not np.isfinite(comp).all():
                    raise PositivityError("g0 component not finite on the sample")
        for comp in w:
            if not np.isfinite(comp).all():
                raise PositivityError("omega component not finite on the sample")
        if self.dim == 1:
            if not (g[0][0] > 0).all():
                raise PositivityError("g0 not positive on the sample")
            omega_norm2 = w[0] ** 2 / g[0][0]
        else:
            g11, g12, g22 = g[0][0], g[0][1], g[1][1]
            det = g11 * g22 - g12 ** 2
            if not ((g11 > 0) & (det > 0)).all():
                raise PositivityError("g0 not positive definite on the sample")
            # |omega|^2 in the g0 cometric
            omega_norm2 = (g22 * w[0] ** 2 - 2 * g12 * w[0] * w[1]
                           + g11 * w[1] ** 2) / det
        if self.form == "classic" and not (omega_norm2 < 1.0).all():
            worst = float(np.sqrt(omega_norm2.max()))
            raise PositivityError(
                f"classic Randers positivity violated: |omega|_g0 reaches {worst:.6g} >= 1")

    def norm_split(self, pts: np.ndarray, vecs: np.ndarray):
        """Return (symmetric part, omega(v)) of F at points/vectors.

        F_forward = sym + om, F_backward (= F(-v)) = sym - om.
        """
        g, w = self.coefficient_arrays(pts)
        if self.dim == 1:
            q = g[0][0] * vecs[..., 0] ** 2
            om = w[0] * vecs[..., 0]
        else:
            vx, vy = vecs[..., 0], vecs[..., 1]
            q = g[0][0] * vx ** 2 + 2 * g[0][1] * vx * vy + g[1][1] * vy ** 2
            om = w[0] * vx + w[1] * vy
        if self.form == "fermat":
            sym = np.sqrt(q + om ** 2)
        else:
            sym = np.sqrt(q)
        return sym, om


def randers_norm(R: RandersData, at: Sequence[float], v: Sequence[float]) -> float:
    """F(at, v).  Nonnegative; zero iff v = 0 (given valid data)."""
    pts = np.asarray(at, dtype=float).reshape(1, R.dim)
    vecs = np.asarray(v, dtype=float).reshape(1, R.dim)
    R.validate_points(pts)
    sym, om = R.norm_split(pts, vecs)
    val = float(sym[0] + om[0])
    if not math.isfinite(val):
        raise PositivityError(f"norm not finite at {at}")
    return val


def segment_lengths(R: RandersData, a: np.ndarray, b: np.ndarray, steps: int,
                    wrap=None):
    """Composite-midpoint F-lengths of straight chart segments a -> b.

    a, b: arrays (k, dim).  Returns (forward, backward) length arrays where
    backward is the length of the reversed segment b -> a; the two are
    computed from one pass over the same midpoints, so negating omega
    exactly swaps them.

    ``wrap``: optional dict {axis: (lo, hi)} folding midpoint coordinates
    of glued axes back into range before evaluating the fields.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    delta = b - a
    t = (np.arange(steps) + 0.5) / steps
    mids = a[:, None, :] + t[None, :, None] * delta[:, None, :]
    if wrap:
        for axis, (lo, hi) in wrap.items():
            span = hi - lo
            mids[..., axis] = lo + np.mod(mids[..., axis] - lo, span)
    sym, om = R.norm_split(mids, np.broadcast_to(delta[:, None, :], mids.shape))
    s = sym.mean(axis=1)
    o = om.mean(axis=1)
    return s + o, s - o


def segment_length(R: RandersData, a, b, steps: int) -> float:
    """Forward F-length of the straight chart segment a -> b."""
    a = np.asarray(a, dtype=float).reshape(1, R.dim)
    b = np.asarray(b, dtype=float).reshape(1, R.dim)
    fwd, _ = segment_lengths(R, a, b, steps)
    val = float(fwd[0])
    if not math.isfinite(val):
        raise PositivityError("segment length not finite")
    return val
