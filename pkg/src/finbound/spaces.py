"""Named example spaces with annotated boundary sequences and curves.

Each builder returns a SampledSpace whose ``annotations`` carry the
distinguished data the verdict pipelines consume:

  sequences: name -> list of point ids (index-ordered),
  curves:    name -> {"ids": [...], "direction": "forward"|"backward",
                      "omega_end": float or inf},
  base_id / probe_id: normalization and probe points.

Where a source figure fixes only the qualitative behaviour of the metric
(finite length one way, infinite the other; crossings that get cheap at a
prescribed rate), one concrete realization is chosen here and documented
in the builder docstring.  The device used throughout: in the Fermat form
with unit g0, a covector component w = (a - 1/a)/2 prices motion along
the positive coordinate direction at exactly a per unit and the reversed
motion at exactly 1/a per unit.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix

from .graph import EDGE_QUANTUM, BuildError, SampledSpace, SpaceSpec, build_graph
from .randers import RandersData

INF = math.inf


def _fmt(v: float) -> str:
    return repr(float(v))


def plateau(var: str, center: float, inner: float, outer: float) -> str:
    """A hat profile in ``var``: 1 within ``inner`` of center, 0 beyond ``outer``."""
    c, i, o = float(center), float(inner), float(outer)
    return (f"max(0, min(1, ({_fmt(o)} - abs({var} - {_fmt(c)}))"
            f"/{_fmt(o - i)}))")


def cheap_forward_coefficient(decay_power: int) -> str:
    """w(y) = (a - 1/a)/2 for a(y) = 1/(2+y)^p: forward cost a, backward 1/a."""
    p = int(decay_power)
    return f"(1/(2 + y)^{p} - (2 + y)^{p})/2"


def _column_ids(space: SampledSpace, x: float, ys: np.ndarray) -> list[int]:
    return [space.nearest_id((x, y)) for y in ys]


def _curve(ids, direction="forward", omega_end=None):
    return {"ids": [int(i) for i in ids], "direction": direction,
            "omega_end": omega_end}


# ---------------------------------------------------------------------------
# 1D half line, integrable forward cost


def halfline_r2(T: float = 200.0, h: float = 0.05, n_terms: int = 80) -> SampledSpace:
    """Half line (0, T] with g0 = dx^2/(1+x^2) and omega = -dx.

    Rightward motion costs |v| (sqrt(1 + 1/(1+x^2)) - 1) ~ 1/(2x^2) per
    unit, integrable toward infinity; leftward motion costs more than 2
    per unit, so the zig-zag sequence x_n = n + (-1)^(n+1) fails the
    ordered Cauchy test while its rightward double limits vanish.
    """
    spec = SpaceSpec(kind="halfline_r2", chart="line", domain=((h, T),),
                     resolution=h,
                     fields={"g0": "1/(1 + x^2)", "omega": ["-1"],
                             "form": "fermat"},
                     params={"T": T, "n_terms": n_terms})
    space = build_graph(spec)
    xs = [n + (-1) ** (n + 1) for n in range(1, n_terms + 1)]
    if max(xs) > T:
        raise BuildError("truncation too small for the requested terms")
    seq = [space.nearest_id((x,)) for x in xs]
    monotone = [space.nearest_id((2 * k,)) for k in range(1, int(T // 2))]
    space.annotations.update({
        "sequences": {"x_n": seq, "rightward": monotone},
        "curves": {},
        "base_id": space.nearest_id((1.0,)),
        "probe_id": space.nearest_id((1.0,)),
    })
    return space


# ---------------------------------------------------------------------------
# Punctured disk with a slit, asymmetric angular cost


def punctured_disk(h_r: float = 0.01, h_theta: float = math.pi / 200,
                   n_terms: int = 40) -> SampledSpace:
    """Unit disk minus the segment [-1, 0] x {0}, in polar coordinates.

    F = sqrt(dr^2 + r^2 dtheta^2 + (1-r)^2 dtheta^2) - (1-r) dtheta: the
    direction of increasing theta is nearly free close to the rim and the
    center, the opposite one keeps a cost of order |dtheta|/2.  The slit
    is realized by not gluing theta across +-pi.
    """
    spec = SpaceSpec(kind="punctured_disk", chart="polar",
                     domain=((h_r, 1.0 - h_r),
                             (-math.pi + h_theta, math.pi - h_theta)),
                     resolution=(h_r, h_theta),
                     fields={"g0": [["1", "0"], ["0", "r*r"]],
                             "omega": ["0", "-(1 - r)"],
                             "form": "fermat"},
                     params={"n_terms": n_terms})
    space = build_graph(spec)
    seq_x = [space.nearest_id((1.0 / n, 0.0)) for n in range(1, n_terms + 1)]
    seq_xp = [space.nearest_id((1.0 / n, math.pi / 2)) for n in range(1, n_terms + 1)]
    space.annotations.update({
        "sequences": {"x_n": seq_x, "xp_n": seq_xp},
        "curves": {},
        "base_id": space.nearest_id((0.5, 0.0)),
        "probe_id": space.nearest_id((0.5, math.pi / 2)),
    })
    return space


# ---------------------------------------------------------------------------
# Ladder with one-way rungs: d_Q(z1, z2) = 0, d_Q(z2, z1) -> infinity


def staircase_fig1(T: float = 40.0, h: float = 0.1) -> SampledSpace:
    """Two upward-cheap corridors joined by one-way rungs.

    Corridor cores run along x = 1 and x = 2; between consecutive rungs
    the middle band is excised.  Upward motion on the cores and rightward
    motion across the rungs cost 1/(2+y)^3 per unit, the reversed motions
    (2+y)^3.  Hence the tail of core 1 reaches the tail of core 2 at
    vanishing cost, while every return path must either re-cross a rung
    leftward or descend, both at diverging cost.
    """
    a_pow = 3
    w = cheap_forward_coefficient(a_pow)
    vbump = f"({plateau('x', 1.0, 0.2, 0.5)} + {plateau('x', 2.0, 0.2, 0.5)})"
    mid = plateau("x", 1.5, 0.5, 0.8)
    omega_y = f"{w} * {vbump}"
    omega_x = f"{w} * {mid}"
    excisions = []
    k = 0
    while k + 1 <= T + 1:
        excisions.append({"min": (1.0 + h / 2, k + 0.2 + h / 2),
                          "max": (2.0 - h / 2, k + 1.0 - h / 2)})
        k += 1
    spec = SpaceSpec(kind="staircase_fig1", chart="cartesian",
                     domain=((0.0, 3.0), (-1.0, T)), resolution=h,
                     fields={"g0": [["1", "0"], ["0", "1"]],
                             "omega": [omega_x, omega_y], "form": "fermat"},
                     excisions=tuple(excisions),
                     params={"T": T})
    space = build_graph(spec)
    n_terms = int(T) - 1
    ys = np.array([n + 0.2 for n in range(1, n_terms + 1)])
    z1 = _column_ids(space, 1.0, ys)
    z2 = _column_ids(space, 2.0, ys)
    alternating = [i for pair in zip(z1, z2) for i in pair]
    rows = np.arange(0.0, ys[-1] + 0.5 * h, h)
    space.annotations.update({
        "sequences": {"z1_seq": z1, "z2_seq": z2, "alternating": alternating},
        "curves": {"c1": _curve(_column_ids(space, 1.0, rows)),
                   "c2": _curve(_column_ids(space, 2.0, rows))},
        "base_id": space.nearest_id((0.5, 0.0)),
        "probe_id": space.nearest_id((0.5, 0.0)),
    })
    return space


# ---------------------------------------------------------------------------
# Cylinder with one upward-cheap and one downward-cheap strip


def cylinder_fig2(T: float = 40.0, h: float = 0.1,
                  one_region: bool = False) -> SampledSpace:
    """Strip [-6,6] x (-1, T] with x = +-6 glued.

    The strip around x = -3 makes upward motion cost 1/(2+y)^2 per unit
    (its reverse (2+y)^2), so the upward ray there has finite forward
    length and defines the single forward boundary class z+.  The strip
    around x = +3 is mirrored (downward cheap), defining the single
    backward class z-.  Off the strips the metric is Euclidean, which
    keeps d(z+, x) and d(x, z-) finite: the boundaries do not pair evenly.
    With ``one_region`` the second strip is dropped and the space becomes
    evenly pairing.
    """
    w = cheap_forward_coefficient(2)
    up = f"{w} * {plateau('x', -3.0, 0.2, 0.5)}"
    down = f"(0 - {w}) * {plateau('x', 3.0, 0.2, 0.5)}"
    omega_y = up if one_region else f"({up} + {down})"
    spec = SpaceSpec(kind="cylinder_fig2", chart="cartesian",
                     domain=((-6.0, 6.0), (-1.0, T)), resolution=h,
                     fields={"g0": [["1", "0"], ["0", "1"]],
                             "omega": ["0", omega_y], "form": "fermat"},
                     identifications=({"axis": 0},),
                     params={"T": T, "one_region": one_region})
    space = build_graph(spec)
    n_terms = int(T) - 1
    ys = np.array([float(n) for n in range(1, n_terms + 1)])
    rows = np.arange(0.0, ys[-1] + 0.5 * h, h)
    sequences = {"z_plus_seq": _column_ids(space, -3.0, ys)}
    curves = {"c1": _curve(_column_ids(space, -3.0, rows))}
    if not one_region:
        sequences["z_minus_seq"] = _column_ids(space, 3.0, ys)
        curves["c2"] = _curve(_column_ids(space, 3.0, rows), direction="backward")
    space.annotations.update({
        "sequences": sequences,
        "curves": curves,
        "base_id": space.nearest_id((0.0, 0.0)),
        "probe_id": space.nearest_id((0.0, 0.0)),
    })
    return space


def double_fig2(T: float = 30.0, h: float = 0.1) -> SampledSpace:
    """Two copies of the cylinder_fig2 strip pattern on [-12, 12] glued.

    Upward-cheap strips at x = -9 and x = +3 (classes z1+, z2+),
    downward-cheap strips at x = -3 and x = +9 (classes z1-, z2-).  By the
    gluing, all four crossing distances d+(zi+, zj-) equal 6 up to
    discretization, which is what makes every TIP pair with both TIFs.
    """
    w = cheap_forward_coefficient(2)
    ups = " + ".join(f"{w} * {plateau('x', c, 0.2, 0.5)}" for c in (-9.0, 3.0))
    downs = " + ".join(f"{w} * {plateau('x', c, 0.2, 0.5)}" for c in (-3.0, 9.0))
    omega_y = f"({ups}) - ({downs})"
    spec = SpaceSpec(kind="double_fig2", chart="cartesian",
                     domain=((-12.0, 12.0), (-1.0, T)), resolution=h,
                     fields={"g0": [["1", "0"], ["0", "1"]],
                             "omega": ["0", omega_y], "form": "fermat"},
                     identifications=({"axis": 0},),
                     params={"T": T})
    space = build_graph(spec)
    n_terms = int(T) - 1
    ys = np.array([float(n) for n in range(1, n_terms + 1)])
    rows = np.arange(0.0, ys[-1] + 0.5 * h, h)
    space.annotations.update({
        "sequences": {"z1p_seq": _column_ids(space, -9.0, ys),
                      "z1m_seq": _column_ids(space, -3.0, ys),
                      "z2p_seq": _column_ids(space, 3.0, ys),
                      "z2m_seq": _column_ids(space, 9.0, ys)},
        "curves": {"c1": _curve(_column_ids(space, -9.0, rows)),
                   "c2": _curve(_column_ids(space, -3.0, rows), direction="backward"),
                   "c3": _curve(_column_ids(space, 3.0, rows)),
                   "c4": _curve(_column_ids(space, 9.0, rows), direction="backward")},
        "base_id": space.nearest_id((-6.0, 0.0)),
        "probe_id": space.nearest_id((-6.0, 0.0)),
    })
    return space


# ---------------------------------------------------------------------------
# Comb spaces (hand-built metric graphs)


def _metric_graph(points: list[tuple], segments: list[tuple[int, int, float]],
                  kind: str, h: float) -> SampledSpace:
    pts = np.asarray(points, dtype=float)
    n = len(points)
    rows, cols, data = [], [], []
    for i, j, wgt in segments:
        q = max(round(wgt / EDGE_QUANTUM) * EDGE_QUANTUM, EDGE_QUANTUM)
        rows += [i, j]
        cols += [j, i]
        data += [q, q]
    graph = csr_matrix((data, (rows, cols)), shape=(n, n))
    spec = SpaceSpec(kind=kind, chart="cartesian", domain=((0, 1), (0, 1)),
                     resolution=h, params={"hand_built": True})
    return SampledSpace(points=pts, csgraph=graph, chart="cartesian",
                        spec=spec, randers=RandersData.euclidean(2),
                        h=h, annotations={})


def _comb(n_teeth: int, h_base: float, h_tooth: float, with_top: bool,
          kind: str) -> SampledSpace:
    roots = [1.0 / n for n in range(1, n_teeth + 1)]
    base_x = sorted(set(np.round(np.arange(h_base, 1.0 + h_base / 2, h_base), 12))
                    | set(np.round(roots, 12)))
    index: dict[tuple, int] = {}
    points: list[tuple] = []

    def node(x, y):
        key = (round(x, 12), round(y, 12))
        if key not in index:
            index[key] = len(points)
            points.append(key)
        return index[key]

    segments = []
    prev = None
    for x in base_x:
        cur = node(x, 0.0)
        if prev is not None:
            segments.append((prev, cur, x - prev_x))
        prev, prev_x = cur, x
    if with_top:
        prev = None
        for x in base_x:
            cur = node(x, 1.0)
            if prev is not None:
                segments.append((prev, cur, x - prev_x))
            prev, prev_x = cur, x
    tooth_ys = np.round(np.arange(h_tooth, 1.0 - h_tooth / 2, h_tooth), 12)
    if with_top:
        tooth_ys = np.append(tooth_ys, 1.0)
    for x in roots:
        prev = node(x, 0.0)
        prev_y = 0.0
        for y in tooth_ys:
            cur = node(x, y)
            segments.append((prev, cur, y - prev_y))
            prev, prev_y = cur, y

    space = _metric_graph(points, segments, kind, h=h_tooth)
    seq = [index[(round(1.0 / n, 12), 0.5)] for n in range(1, n_teeth + 1)]
    corner = [index[(round(1.0 / n, 12), 0.0)] for n in range(1, n_teeth + 1)]
    sequences = {"x_n": seq, "corner_seq": corner}
    if with_top:
        sequences["top_corner_seq"] = [index[(round(1.0 / n, 12), 1.0)]
                                       for n in range(1, n_teeth + 1)]
    space.annotations.update({
        "sequences": sequences,
        "curves": {},
        "base_id": index[(1.0, 0.0)],
        "probe_id": index[(1.0, 0.0)],
    })
    return space


def comb_basic(n_teeth: int = 30, h_base: float = 0.02,
               h_tooth: float = 0.05) -> SampledSpace:
    """Teeth at x = 1/n over a base segment; one boundary corner (0, 0)."""
    return _comb(n_teeth, h_base, h_tooth, with_top=False, kind="comb_basic")


def comb_extended(n_teeth: int = 30, h_base: float = 0.02,
                  h_tooth: float = 0.05) -> SampledSpace:
    """Comb with both a base and a top bar; boundary corners (0,0), (0,1)."""
    return _comb(n_teeth, h_base, h_tooth, with_top=True, kind="comb_extended")


# ---------------------------------------------------------------------------
# Horizontal ladder: two rails to infinity joined by rungs


def staircase_fig6(T: float = 30.0, h_rail: float = 0.1,
                   h_rung: float = 0.1) -> SampledSpace:
    """Rails y = 0 and y = 1 over x in (0, T], rungs at integer x.

    Both rails are unit-speed rays; their Busemann functions differ by a
    non-constant amount, yet the mid-rung sequence x_n = (n, 1/2) has both
    of them as chronological limits while its pointwise limit is the max
    of the two, which is not a Busemann function of any curve.
    """
    index: dict[tuple, int] = {}
    points: list[tuple] = []

    def node(x, y):
        key = (round(x, 12), round(y, 12))
        if key not in index:
            index[key] = len(points)
            points.append(key)
        return index[key]

    segments = []
    rail_x = np.round(np.arange(h_rail, T + h_rail / 2, h_rail), 12)
    for y in (0.0, 1.0):
        prev = None
        for x in rail_x:
            cur = node(x, y)
            if prev is not None:
                segments.append((prev, cur, h_rail))
            prev = cur
    n_rungs = int(T) - 1
    rung_ys = np.round(np.arange(h_rung, 1.0 - h_rung / 2, h_rung), 12)
    for k in range(1, n_rungs + 1):
        prev = node(float(k), 0.0)
        prev_y = 0.0
        for y in list(rung_ys) + [1.0]:
            cur = node(float(k), y)
            segments.append((prev, cur, y - prev_y))
            prev, prev_y = cur, y

    space = _metric_graph(points, segments, "staircase_fig6", h=max(h_rail, h_rung))
    bottom = [index[(round(x, 12), 0.0)] for x in rail_x]
    top = [index[(round(x, 12), 1.0)] for x in rail_x]
    seq = [index[(float(k), 0.5)] for k in range(1, n_rungs + 1)]
    space.annotations.update({
        "sequences": {"x_n": seq},
        "curves": {"c1": _curve(bottom, omega_end=INF),
                   "c2": _curve(top, omega_end=INF)},
        "base_id": index[(1.0, 0.0)],
        "probe_id": index[(1.0, 0.0)],
    })
    return space


# ---------------------------------------------------------------------------
# Chimney cylinders (Riemannian, conformal factor decaying in the columns)


def _chimneys(T: float, h: float, centers: tuple[float, ...],
              kind: str) -> SampledSpace:
    bump = " + ".join(plateau("x", c, 0.3, 0.6) for c in centers)
    lam = f"(1 + (exp(0 - max(0, y)) - 1) * ({bump}))"
    lam2 = f"{lam} * {lam}"
    spec = SpaceSpec(kind=kind, chart="cartesian",
                     domain=((-6.0, 6.0), (-1.0, T)), resolution=h,
                     fields={"g0": [[lam2, "0"], ["0", lam2]],
                             "omega": ["0", "0"], "form": "fermat"},
                     identifications=({"axis": 0},),
                     params={"T": T, "centers": list(centers)})
    space = build_graph(spec)
    n_terms = int(T) - 1
    ys = np.array([float(n) for n in range(1, n_terms + 1)])
    rows = np.arange(0.0, ys[-1] + 0.5 * h, h)
    sequences = {"midline": _column_ids(space, 0.0, ys)}
    curves = {}
    for c in centers:
        tag = f"{c:+.0f}".replace("+", "p").replace("-", "m")
        sequences[f"chimney_seq_{tag}"] = _column_ids(space, c, ys)
        curves[f"c_{tag}"] = _curve(_column_ids(space, c, rows))
        curves[f"c_{tag}_bwd"] = _curve(_column_ids(space, c, rows),
                                        direction="backward")
    for a in (-3.0, -1.0, 0.0, 1.0, 3.0):
        tag = f"{a:+.0f}".replace("+", "p").replace("-", "m")
        sequences[f"vert_{tag}"] = _column_ids(space, a, ys)
        # unit-rate vertical probes: parametrized by height, so they
        # escape in time over a bounded spatial region (apex probes)
        vert = _curve(_column_ids(space, a, rows), omega_end=INF)
        vert["s"] = [float(y) for y in rows]
        curves[f"cvert_{tag}"] = vert
    space.annotations.update({
        "sequences": sequences,
        "curves": curves,
        "base_id": space.nearest_id((0.0, 0.0)),
        "probe_id": space.nearest_id((0.0, 0.0)),
    })
    return space


def chimney1(T: float = 30.0, h: float = 0.1) -> SampledSpace:
    """One chimney column at x = 0 on the glued strip; one boundary class."""
    return _chimneys(T, h, (0.0,), "chimney1")


def chimney2(T: float = 30.0, h: float = 0.1) -> SampledSpace:
    """Chimneys at x = -3 and x = +3: two boundary classes bridged, in the
    pointwise topology, by a continuum of limit functions."""
    return _chimneys(T, h, (-3.0, 3.0), "chimney2")


# ---------------------------------------------------------------------------
# Flat spaces for the spacetime oracles


def flat_square(L: float = 2.0, h: float = 0.05, w: tuple = (0.0, 0.0),
                form: str = "classic", puncture: float = 0.0) -> SampledSpace:
    """Flat square [0, L]^2 with a constant one-form, optionally punctured.

    With ``form='classic'`` the norm is |v| + <w, v>, whose closed-form
    distance is |b - a| + <w, b - a>; |w| >= 1 is a build error.  A
    positive ``puncture`` excises an open disk (as a square of that
    radius) around the center.
    """
    excisions = []
    c = L / 2.0
    if puncture > 0:
        excisions.append({"min": (c - puncture, c - puncture),
                          "max": (c + puncture, c + puncture)})
    spec = SpaceSpec(kind="flat_square", chart="cartesian",
                     domain=((0.0, L), (0.0, L)), resolution=h,
                     fields={"g0": [["1", "0"], ["0", "1"]],
                             "omega": [_fmt(w[0]), _fmt(w[1])],
                             "form": form},
                     excisions=tuple(excisions),
                     params={"L": L, "w": list(w), "puncture": puncture})
    space = build_graph(spec)
    sequences = {}
    curves = {}
    if puncture > 0:
        rim = puncture + h
        radii = rim + (L / 2 - 2 * h - rim) * 0.7 ** np.arange(14)
        sequences["puncture_seq"] = [space.nearest_id((c + rho, c)) for rho in radii]
        ray = [space.nearest_id((x, c))
               for x in np.arange(L - h, c + rim - h / 2, -h)]
        curves["to_puncture"] = _curve(ray)
        curves["to_puncture_bwd"] = _curve(ray, direction="backward")
    space.annotations.update({
        "sequences": sequences,
        "curves": curves,
        "base_id": space.nearest_id((h, h)),
        "probe_id": space.nearest_id((h, h)),
    })
    return space


BUILDERS = {
    "halfline_r2": halfline_r2,
    "punctured_disk": punctured_disk,
    "staircase_fig1": staircase_fig1,
    "cylinder_fig2": cylinder_fig2,
    "comb_basic": comb_basic,
    "comb_extended": comb_extended,
    "staircase_fig6": staircase_fig6,
    "chimney1": chimney1,
    "chimney2": chimney2,
    "double_fig2": double_fig2,
    "flat_square": flat_square,
}


def build_example(name: str, params: dict | None = None):
    """Build a named example space; returns (space, annotations)."""
    if name not in BUILDERS:
        raise KeyError(f"unknown example {name!r}; known: {sorted(BUILDERS)}")
    space = BUILDERS[name](**(params or {}))
    return space, space.annotations
