"""Directed weighted graphs sampled from Randers space specs.

A space spec fixes a chart, a rectangular (or 1D) sample domain, a grid
step, metric coefficient fields, optional axis gluings and excised
regions.  The builder lays down grid samples, connects 8-neighbor (2D) or
2-neighbor (1D) directed edges, and weighs each edge with the numerical
F-length of its straight chart segment.

Edge weights are quantized to integer multiples of 2**-30 ("the edge
quantum").  Dyadic weights make path sums exact in double precision, so
shortest-path matrices satisfy the triangle inequality exactly and the
omega -> -omega duality (reverse of the distance matrix) holds entrywise
exactly, not just to roundoff.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .extreal import ExtendedNonNeg
from .metric import DistanceOracle
from .randers import PositivityError, RandersData, segment_lengths

EDGE_QUANTUM = 2.0 ** -30


class BuildError(ValueError):
    """The space spec cannot be realized as a graph."""


@dataclass(frozen=True)
class SpaceSpec:
    """Declarative description of a sampled space.

    domain: per-axis (lo, hi); resolution: per-axis step (scalar allowed);
    identifications: axes to glue end-to-end ([{"axis": 0}]); excisions:
    open rectangles [{"min": [...], "max": [...]}] removed from the domain.
    """

    kind: str = "grid"
    chart: str = "cartesian"
    domain: tuple = ((0.0, 1.0), (0.0, 1.0))
    resolution: tuple | float = 0.1
    fields: dict | None = None          # {"g0": ..., "omega": ..., "form": ...}
    identifications: tuple = ()
    excisions: tuple = ()
    params: dict = dc_field(default_factory=dict)

    @staticmethod
    def from_dict(data: dict) -> "SpaceSpec":
        return SpaceSpec(
            kind=data.get("kind", "grid"),
            chart=data.get("chart", "cartesian"),
            domain=tuple(tuple(b) for b in data.get("domain", ())),
            resolution=data.get("resolution", 0.1),
            fields=data.get("fields"),
            identifications=tuple(data.get("identifications", ())),
            excisions=tuple(data.get("excisions", ())),
            params=data.get("params", {}),
        )

    @staticmethod
    def load(path) -> "SpaceSpec":
        with open(path) as fh:
            return SpaceSpec.from_dict(json.load(fh))

    def randers(self) -> RandersData:
        f = self.fields or {}
        dim = len(self.domain)
        g0 = f.get("g0", [[1.0, 0.0], [0.0, 1.0]] if dim == 2 else 1.0)
        omega = f.get("omega", [0.0] * dim)
        return RandersData.from_fields(g0, omega, chart=self.chart,
                                       form=f.get("form", "fermat"))


def _axis_samples(lo: float, hi: float, h: float, wrapped: bool) -> np.ndarray:
    n = int(round((hi - lo) / h))
    if n < 1 or abs(lo + n * h - hi) > 1e-9 * max(1.0, abs(hi)):
        n = max(1, int(math.floor((hi - lo) / h + 1e-9)))
    count = n if wrapped else n + 1
    return lo + h * np.arange(count)


_EXC_EPS = 1e-9


def _excised_mask(points: np.ndarray, excisions) -> np.ndarray:
    """True where a point lies strictly inside some excised rectangle."""
    out = np.zeros(points.shape[:-1], dtype=bool)
    for exc in excisions:
        lo = np.asarray(exc["min"], dtype=float)
        hi = np.asarray(exc["max"], dtype=float)
        inside = np.ones(points.shape[:-1], dtype=bool)
        for ax in range(points.shape[-1]):
            inside &= (points[..., ax] > lo[ax] + _EXC_EPS) & \
                      (points[..., ax] < hi[ax] - _EXC_EPS)
        out |= inside
    return out


@dataclass
class SampledSpace:
    """A finite directed-graph stand-in for a Randers space."""

    points: np.ndarray                 # (n, dim) chart coordinates
    csgraph: csr_matrix                # directed edge weights
    chart: str
    spec: SpaceSpec
    randers: RandersData
    h: float                           # finest grid step
    annotations: dict = dc_field(default_factory=dict)
    quantum: float = EDGE_QUANTUM

    def __post_init__(self):
        self._row_cache: dict[int, np.ndarray] = {}
        self._col_cache: dict[int, np.ndarray] = {}
        self._csgraph_T = None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def edge_arrays(self):
        """(sources, targets, weights) of all directed edges."""
        coo = self.csgraph.tocoo()
        return coo.row, coo.col, coo.data

    def xy(self) -> np.ndarray:
        """Points in embedding coordinates (polar charts unrolled)."""
        if self.chart == "polar":
            r, th = self.points[:, 0], self.points[:, 1]
            return np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
        return self.points

    def nearest_id(self, coords) -> int:
        coords = np.asarray(coords, dtype=float)
        d2 = ((self.points - coords[None, :]) ** 2).sum(axis=1)
        return int(np.argmin(d2))

    def dist_from(self, sources: Sequence[int]) -> np.ndarray:
        """Rows d(source, .) for each source (cached per source)."""
        sources = [int(s) for s in sources]
        missing = sorted({s for s in sources if s not in self._row_cache})
        if missing:
            rows = dijkstra(self.csgraph, directed=True, indices=missing)
            for s, row in zip(missing, np.atleast_2d(rows)):
                self._row_cache[s] = row
        return np.stack([self._row_cache[s] for s in sources])

    def dist_to(self, targets: Sequence[int]) -> np.ndarray:
        """Rows d(., target) for each target (cached per target)."""
        targets = [int(t) for t in targets]
        missing = sorted({t for t in targets if t not in self._col_cache})
        if missing:
            if self._csgraph_T is None:
                self._csgraph_T = self.csgraph.T.tocsr()
            rows = dijkstra(self._csgraph_T, directed=True, indices=missing)
            for t, row in zip(missing, np.atleast_2d(rows)):
                self._col_cache[t] = row
        return np.stack([self._col_cache[t] for t in targets])

    def suboracle(self, ids: Sequence[int]) -> DistanceOracle:
        ids = [int(i) for i in ids]
        rows = self.dist_from(ids)
        return DistanceOracle(rows[:, ids], labels=[tuple(self.points[i]) for i in ids])

    def reverse_space(self) -> "SampledSpace":
        """The same sample with all edges reversed (the metric of -omega)."""
        rev = SampledSpace(points=self.points,
                           csgraph=self.csgraph.T.tocsr(),
                           chart=self.chart, spec=self.spec,
                           randers=self.randers, h=self.h,
                           annotations=dict(self.annotations),
                           quantum=self.quantum)
        return rev


def shortest_distance(space: SampledSpace, source: int, targets: Sequence[int]):
    """Exact single-source shortest-path distances; unreachable -> inf."""
    row = space.dist_from([source])[0]
    return [ExtendedNonNeg(row[int(t)]) for t in targets]


def _quantize(w: np.ndarray) -> np.ndarray:
    q = np.round(w / EDGE_QUANTUM) * EDGE_QUANTUM
    return np.maximum(q, EDGE_QUANTUM)


def build_graph(spec: SpaceSpec, randers: RandersData | None = None,
                annotations: dict | None = None) -> SampledSpace:
    """Sample the spec's domain and connect directed neighbor edges.

    Raises BuildError (wrapping PositivityError) when the metric data is
    invalid anywhere on the sample, and when excisions disconnect the
    sample into more than one strongly connected component unless the
    spec sets params["allow_disconnected"].
    """
    R = randers if randers is not None else spec.randers()
    dim = len(spec.domain)
    if dim not in (1, 2):
        raise BuildError("only 1D and 2D domains are supported")
    if R.dim != dim:
        raise BuildError("metric dimension does not match the domain")

    res = spec.resolution
    steps_per_axis = (res if isinstance(res, (tuple, list)) else (res,) * dim)
    wrapped_axes = {ident["axis"] for ident in spec.identifications}
    axes = [
        _axis_samples(lo, hi, h, ax in wrapped_axes)
        for ax, ((lo, hi), h) in enumerate(zip(spec.domain, steps_per_axis))
    ]
    shape = tuple(len(a) for a in axes)
    mesh = np.meshgrid(*axes, indexing="ij")
    grid_pts = np.stack([m.ravel() for m in mesh], axis=1)

    keep = ~_excised_mask(grid_pts, spec.excisions)
    if not keep.any():
        raise BuildError("every sample point is excised")
    index = np.full(grid_pts.shape[0], -1, dtype=np.int64)
    index[keep] = np.arange(int(keep.sum()))
    points = grid_pts[keep]

    try:
        R.validate_points(points)
    except PositivityError as exc:
        raise BuildError(str(exc)) from exc

    wrap_info = {ax: (spec.domain[ax][0], spec.domain[ax][1]) for ax in wrapped_axes}

    if dim == 1:
        offsets = [(1,)]
    else:
        offsets = [(1, 0), (0, 1), (1, 1), (1, -1)]

    h_min = float(min(steps_per_axis))
    rows_out, cols_out, fwd_out, bwd_out = [], [], [], []
    grid_idx = np.stack([m.ravel() for m in np.meshgrid(
        *[np.arange(s) for s in shape], indexing="ij")], axis=1)

    for off in offsets:
        nbr = grid_idx + np.asarray(off)
        valid = np.ones(len(nbr), dtype=bool)
        for ax in range(dim):
            if ax in wrapped_axes:
                nbr[:, ax] %= shape[ax]
            else:
                valid &= (nbr[:, ax] >= 0) & (nbr[:, ax] < shape[ax])
        src_flat = np.nonzero(valid)[0]
        dst_flat = np.ravel_multi_index(nbr[valid].T, shape)
        ok = keep[src_flat] & keep[dst_flat]
        src_flat, dst_flat = src_flat[ok], dst_flat[ok]
        if len(src_flat) == 0:
            continue

        a = grid_pts[src_flat]
        delta = np.asarray(off, dtype=float) * np.asarray(steps_per_axis)
        b = a + delta[None, :]
        seg_len = float(np.hypot(*delta) if dim == 2 else abs(delta[0]))
        steps = max(1, math.ceil(seg_len / h_min)) * 4

        # drop edges whose segment passes through an excised region
        if spec.excisions:
            t = (np.arange(steps) + 0.5) / steps
            mids = a[:, None, :] + t[None, :, None] * delta[None, None, :]
            for ax, (lo, hi) in wrap_info.items():
                mids[..., ax] = lo + np.mod(mids[..., ax] - lo, hi - lo)
            crosses = _excised_mask(mids, spec.excisions).any(axis=1)
            a, src_flat, dst_flat = a[~crosses], src_flat[~crosses], dst_flat[~crosses]
            b = a + delta[None, :]
            if len(src_flat) == 0:
                continue

        fwd, bwd = segment_lengths(R, a, b, steps, wrap=wrap_info or None)
        if not (np.isfinite(fwd).all() and np.isfinite(bwd).all()):
            raise BuildError("metric fields produced a non-finite edge weight")
        if (fwd <= 0).any() or (bwd <= 0).any():
            raise BuildError("metric produced a non-positive edge weight")
        rows_out.append(index[src_flat])
        cols_out.append(index[dst_flat])
        fwd_out.append(_quantize(fwd))
        bwd_out.append(_quantize(bwd))

    if not rows_out:
        raise BuildError("no edges produced")
    rows = np.concatenate(rows_out + cols_out)
    cols = np.concatenate(cols_out + rows_out)
    data = np.concatenate(fwd_out + bwd_out)
    n = points.shape[0]
    graph = csr_matrix((data, (rows, cols)), shape=(n, n))

    space = SampledSpace(points=points, csgraph=graph, chart=spec.chart,
                         spec=spec, randers=R, h=h_min,
                         annotations=annotations or {})
    if not spec.params.get("allow_disconnected"):
        _check_connected(space)
    return space


def _check_connected(space: SampledSpace):
    row = space.dist_from([0])[0]
    back = space.dist_to([0])[0]
    if not (np.isfinite(row).all() and np.isfinite(back).all()):
        raise BuildError("sample is not strongly connected "
                         "(set params.allow_disconnected to permit this)")
