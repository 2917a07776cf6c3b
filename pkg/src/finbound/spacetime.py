"""Standard stationary spacetime layer over a sampled Randers space.

Events are pairs (t, x).  Chronology is the cone test on the forward
Fermat distance, past/future sets are hypographs/epigraphs of Lipschitz
functions, terminal sets come from Busemann functions of speed-bounded
curves, and the boundary pairing follows the mutual-maximality relation
restricted to the finite probe catalog.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .busemann import (BusemannFunction, SpeedBoundedCurve, busemann_eval,
                       classify_busemann, curve_from_annotation)
from .completion import CauchyClass, CompletionCatalog, quasi_distance
from .graph import SampledSpace
from .gromov import SampledFunction, is_lipschitz1

Character = Literal["timelike", "horismotic", "locally_horismotic"]


@dataclass
class StationarySpacetime:
    """R x M with metric -dt^2 + omega x dt + dt x omega + g0 (unit lapse).

    The spatial sample with its directed weights is the forward Fermat
    graph; the backward one is exactly its edge transpose.
    """

    space: SampledSpace

    @property
    def fermat_plus(self) -> SampledSpace:
        return self.space

    @property
    def fermat_minus(self) -> SampledSpace:
        if not hasattr(self, "_reversed"):
            self._reversed = self.space.reverse_space()
        return self._reversed

    def d_plus(self, i: int, j: int) -> float:
        return float(self.space.dist_from([int(i)])[0][int(j)])


def fermat_graphs(space: SampledSpace) -> StationarySpacetime:
    """Wrap a built Randers sample as a stationary spacetime."""
    return StationarySpacetime(space)


@dataclass(frozen=True)
class Event:
    t: float
    x: int


def chron_rel(a: Event, b: Event, st: StationarySpacetime) -> bool:
    """a << b iff d+(x_a, x_b) < t_b - t_a (strict)."""
    return st.d_plus(a.x, b.x) < (b.t - a.t)


def past_membership(f: SampledFunction, e: Event, st: StationarySpacetime,
                    tol: float | None = None, audit: bool = True) -> bool:
    """(t, x) in P(f) = {t < f(x)}; f must pass the Lipschitz audit.
    The convention P(+inf) = V (every event) is honored."""
    if np.isposinf(f.values).all():
        return True
    if audit:
        _lipschitz_guard(f, st, tol)
    return bool(e.t < f.values[e.x])


def future_membership(f: SampledFunction, e: Event, st: StationarySpacetime,
                      tol: float | None = None, audit: bool = True) -> bool:
    """(t, x) in F(f) = {t > f(x)}; F(-inf) = V."""
    if np.isneginf(f.values).all():
        return True
    if audit:
        _lipschitz_guard(f, st, tol)
    return bool(e.t > f.values[e.x])


def _lipschitz_guard(f: SampledFunction, st: StationarySpacetime, tol):
    tol = 2 * st.space.h if tol is None else tol
    ok, worst, edge = is_lipschitz1(f, st.space, tol)
    if not ok:
        raise ValueError(f"function violates the Lipschitz audit by {worst:.3g} "
                         f"at edge {edge}")


@dataclass
class TerminalDescriptor:
    side: Literal["TIP", "TIF"]
    kind: Literal["cauchy", "properly_busemann", "apex"]
    omega: float | None = None
    class_name: str | None = None
    function: np.ndarray | None = None      # the defining Lipschitz function
    source: str = ""

    @property
    def finite(self) -> bool:
        return self.kind in ("cauchy", "properly_busemann")


def _descriptor_from_busemann(b: BusemannFunction, side: str,
                              source: str) -> TerminalDescriptor:
    if b.kind == "infinite":
        return TerminalDescriptor(side=side, kind="apex", source=source)
    kind = "cauchy" if b.kind == "cauchy_type" else "properly_busemann"
    return TerminalDescriptor(side=side, kind=kind, omega=b.omega,
                              class_name=b.class_name, function=b.values,
                              source=source)


def past_of_curve(curve: SpeedBoundedCurve, st: StationarySpacetime,
                  catalog: CompletionCatalog, tol: float) -> TerminalDescriptor:
    """TIP of the timelike curve t -> (t, c(t)): classify its Busemann
    function (apex when b = +inf)."""
    if curve.direction != "forward":
        raise ValueError("a TIP probe must be a forward curve")
    b = busemann_eval(curve, st.space)
    if b.kind != "infinite":
        b = classify_busemann(b, catalog, tol)
    return _descriptor_from_busemann(b, "TIP", source="past_of_curve")


def future_of_curve(curve: SpeedBoundedCurve, st: StationarySpacetime,
                    catalog: CompletionCatalog, tol: float) -> TerminalDescriptor:
    if curve.direction != "backward":
        raise ValueError("a TIF probe must be a backward curve")
    b = busemann_eval(curve, st.space)
    if b.kind != "infinite":
        b = classify_busemann(b, catalog, tol)
    return _descriptor_from_busemann(b, "TIF", source="future_of_curve")


def _class_by_name(catalog: CompletionCatalog, name: str) -> CauchyClass:
    return catalog.classes[catalog.index(name)]


def _dist_to_class_rows(space: SampledSpace, cls: CauchyClass,
                        from_class: bool) -> np.ndarray:
    """d-(., class) = lim d(rep_m, .) when from_class, else d(., class) =
    lim d(., rep_m); estimated at the deepest representative (the limits
    are eventually monotone along a Cauchy tail, so the last term is the
    sharpest truncation estimate)."""
    last = cls.representative.ids[-1]
    if from_class:
        return space.dist_from([last])[0]
    return space.dist_to([last])[0]


def common_future(P: TerminalDescriptor, st: StationarySpacetime,
                  catalog: CompletionCatalog) -> np.ndarray | None:
    """The common future of a TIP: F(d_p^-) for a Cauchy-type TIP over
    p = (Omega, x+), empty for properly-Busemann TIPs and the apex."""
    if P.side != "TIP":
        raise ValueError("expected a TIP")
    if P.kind != "cauchy":
        return None
    cls = _class_by_name(catalog, P.class_name)
    d_from = _dist_to_class_rows(st.space, cls, from_class=True)
    vals = P.omega + d_from
    if not np.isfinite(vals).any():
        return None
    return vals


def common_past(F: TerminalDescriptor, st: StationarySpacetime,
                catalog: CompletionCatalog) -> np.ndarray | None:
    if F.side != "TIF":
        raise ValueError("expected a TIF")
    if F.kind != "cauchy":
        return None
    cls = _class_by_name(catalog, F.class_name)
    d_to = _dist_to_class_rows(st.space, cls, from_class=False)
    vals = F.omega - d_to
    if not np.isfinite(vals).any():
        return None
    return vals


def class_pair_distance(P_cls: CauchyClass, F_cls: CauchyClass,
                        st: StationarySpacetime, tol: float) -> float:
    """d-(x-, x+) = d+(x+ -> x-): the double limit between the defining
    representatives on the forward graph."""
    return quasi_distance(P_cls, F_cls, st.space, tol).estimate


def s_related(P: TerminalDescriptor, F: TerminalDescriptor,
              st: StationarySpacetime, catalog: CompletionCatalog,
              tif_catalog: Sequence[TerminalDescriptor], tol: float) -> bool:
    """S-relation between a finite TIP and a finite TIF.

    Either both descriptors sit over one mutually-symmetric class at the
    same level, or the stationary pairing conditions hold: the TIF lies in
    the common future of the TIP, it is maximal there among the TIF
    catalog, and the levels differ by exactly the crossing distance.
    """
    if not (P.side == "TIP" and F.side == "TIF"):
        raise ValueError("need a (TIP, TIF) pair")
    if not (P.finite and F.finite):
        raise ValueError("S-relation test needs finite descriptors")
    if P.kind != "cauchy" or F.kind != "cauchy":
        return False
    P_cls = _class_by_name(catalog, P.class_name)
    F_cls = _class_by_name(catalog, F.class_name)

    if P.class_name == F.class_name and \
            P_cls.kind in ("symmetrized-boundary", "interior") and \
            abs(P.omega - F.omega) <= tol:
        return True

    gap = class_pair_distance(P_cls, F_cls, st, catalog.tol)
    if not math.isfinite(gap):
        return False
    if abs((F.omega - P.omega) - gap) > tol:
        return False
    up = common_future(P, st, catalog)
    if up is None:
        return False
    f_F = F.omega + _dist_to_class_rows(st.space, F_cls, from_class=True)
    finite = np.isfinite(up) & np.isfinite(f_F)
    if not finite.any() or not (f_F[finite] >= up[finite] - tol).all():
        return False                          # F not inside the common future
    # maximality of F among the TIF catalog inside F(d_p^-)
    for G in tif_catalog:
        if G.kind != "cauchy" or G.class_name == F.class_name:
            continue
        G_cls = _class_by_name(catalog, G.class_name)
        gap_G = class_pair_distance(P_cls, G_cls, st, catalog.tol)
        if not math.isfinite(gap_G):
            continue
        f_G = (P.omega + gap_G) + _dist_to_class_rows(st.space, G_cls,
                                                      from_class=True)
        ok = np.isfinite(f_G) & finite
        inside = (f_G[ok] >= up[ok] - tol).all()
        contains_F = (f_G[ok] <= f_F[ok] + tol).all() and \
            (f_G[ok] <= f_F[ok] - tol).any()
        if inside and contains_F:
            return False
    return True


@dataclass
class BoundaryLine:
    tip: TerminalDescriptor | None
    tif: TerminalDescriptor | None
    character: Character
    gap: float | None = None

    def label(self) -> str:
        p = self.tip.class_name if self.tip and self.tip.class_name else "-"
        f = self.tif.class_name if self.tif and self.tif.class_name else "-"
        return f"({p}|{f})"


def line_causality(line: BoundaryLine, st: StationarySpacetime,
                   catalog: CompletionCatalog, tol: float) -> Character:
    """Timelike iff both sides sit over one mutually-symmetric class;
    horismotic iff one side is empty; otherwise locally horismotic with
    the crossing distance as the chronology gap."""
    if line.tip is None or line.tif is None:
        return "horismotic"
    P, F = line.tip, line.tif
    if P.kind == "cauchy" and F.kind == "cauchy" and \
            P.class_name == F.class_name:
        cls = _class_by_name(catalog, P.class_name)
        if cls.kind in ("symmetrized-boundary", "interior"):
            return "timelike"
    return "locally_horismotic"


def line_witness(line: BoundaryLine, k1: float, k2: float) -> bool:
    """Is the k1-point of the line chronologically below the k2-point
    through an interior event: exists x with f_F + k1 < f_P + k2."""
    if line.tip is None or line.tif is None:
        return False
    f_P = line.tip.function + k2
    f_F_vals = line.tif.function + k1
    ok = np.isfinite(f_P) & np.isfinite(f_F_vals)
    return bool((f_F_vals[ok] < f_P[ok]).any())


@dataclass
class BoundaryReport:
    lines: list[BoundaryLine]
    tips: list[TerminalDescriptor]
    tifs: list[TerminalDescriptor]
    simple: bool
    pair_map: dict

    def to_json_dict(self) -> dict:
        def dsc(d):
            if d is None:
                return None
            return {"side": d.side, "kind": d.kind, "omega": d.omega,
                    "class": d.class_name}
        return {
            "simple": self.simple,
            "tips": [dsc(t) for t in self.tips],
            "tifs": [dsc(t) for t in self.tifs],
            "lines": [{"tip": dsc(l.tip), "tif": dsc(l.tif),
                       "character": l.character, "gap": l.gap}
                      for l in self.lines],
            "pairs": {k: sorted(v) for k, v in self.pair_map.items()},
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)

    def write_dot(self, path):
        with open(path, "w") as fh:
            fh.write("digraph pairing {\n  rankdir=LR;\n")
            for t in self.tips:
                if t.kind == "cauchy":
                    fh.write(f'  "P:{t.class_name}" [shape=box];\n')
            for t in self.tifs:
                if t.kind == "cauchy":
                    fh.write(f'  "F:{t.class_name}" [shape=ellipse];\n')
            for p, fs in sorted(self.pair_map.items()):
                for f in sorted(fs):
                    fh.write(f'  "P:{p}" -> "F:{f}";\n')
            fh.write("}\n")


def assemble_boundary(st: StationarySpacetime, catalog: CompletionCatalog,
                      probe_names: Sequence[str] | None = None,
                      tol: float = 0.25) -> BoundaryReport:
    """Classify the space's annotated probe curves into TIPs/TIFs, pair
    them through the S-relation, and report one line per pairing (plus
    unpaired half-lines).  The simplicity flag drops when any TIP admits
    two TIF partners or vice versa."""
    space = st.space
    curves = space.annotations.get("curves", {})
    names = sorted(curves) if probe_names is None else list(probe_names)
    tips, tifs = [], []
    for name in names:
        curve = curve_from_annotation(space, name)
        if curve.direction == "forward":
            d = past_of_curve(curve, st, catalog, tol)
        else:
            d = future_of_curve(curve, st, catalog, tol)
        d.source = name
        (tips if d.side == "TIP" else tifs).append(d)

    # dedupe by class
    def dedupe(items):
        seen, out = set(), []
        for d in items:
            key = (d.kind, d.class_name)
            if d.kind == "cauchy" and key in seen:
                continue
            seen.add(key)
            out.append(d)
        return out

    tips, tifs = dedupe(tips), dedupe(tifs)
    lines: list[BoundaryLine] = []
    pair_map: dict[str, list[str]] = {}
    matched_tifs: set[str] = set()
    simple = True
    for P in tips:
        if P.kind == "apex":
            continue
        partners = []
        if P.kind == "cauchy":
            for F0 in tifs:
                if F0.kind != "cauchy":
                    continue
                F_cls = _class_by_name(catalog, F0.class_name)
                P_cls = _class_by_name(catalog, P.class_name)
                if P.class_name == F0.class_name and \
                        P_cls.kind in ("symmetrized-boundary", "interior"):
                    omega_F = P.omega
                else:
                    gap = class_pair_distance(P_cls, F_cls, st, catalog.tol)
                    if not math.isfinite(gap):
                        continue
                    omega_F = P.omega + gap
                F = TerminalDescriptor(
                    side="TIF", kind="cauchy", omega=omega_F,
                    class_name=F0.class_name,
                    function=omega_F + _dist_to_class_rows(
                        st.space, F_cls, from_class=True),
                    source=F0.source)
                if s_related(P, F, st, catalog, tifs, tol):
                    partners.append(F)
                    matched_tifs.add(F0.class_name)
        if not partners:
            lines.append(BoundaryLine(P, None, "horismotic"))
            pair_map[P.class_name or P.source] = []
            continue
        if len(partners) > 1:
            simple = False
        pair_map[P.class_name or P.source] = [f.class_name for f in partners]
        for F in partners:
            line = BoundaryLine(P, F, "timelike")
            line.character = line_causality(line, st, catalog, tol)
            if line.character == "locally_horismotic":
                line.gap = F.omega - P.omega
            lines.append(line)
    tif_partner_counts = {}
    for fs in pair_map.values():
        for f in fs:
            tif_partner_counts[f] = tif_partner_counts.get(f, 0) + 1
    if any(v > 1 for v in tif_partner_counts.values()):
        simple = False
    for F in tifs:
        if F.kind == "cauchy" and F.class_name not in matched_tifs:
            lines.append(BoundaryLine(None, F, "horismotic"))
    return BoundaryReport(lines=lines, tips=tips, tifs=tifs,
                          simple=simple, pair_map=pair_map)
