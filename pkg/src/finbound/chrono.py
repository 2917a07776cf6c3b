"""The chronological limit operator over a finite catalog of Busemann
functions, and its backward mirror.

A function f is a chronological limit of a sequence (f_n) when

    (a) f <= liminf f_n pointwise, and
    (b) nothing in the candidate universe fits strictly between f and
        limsup f_n.

The candidate universe here is a finite catalog of classes, each class
contributing all of its real shifts; within one class only the maximal
shift under the liminf can satisfy (b), so membership reduces to a shift
computation plus a blocking test against the other classes.  Limits
inferior/superior are per-sample window statistics with the top/bottom
quarter trimmed: a transient spike from an escaping tail passes a given
sample once, and the eventual liminf/limsup of the full sequence is the
trimmed value, not the raw window extreme.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import SampledSpace
from .gromov import SampledFunction, is_lipschitz1, write_function_csv


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))


@dataclass
class FunctionCatalog:
    entries: list[CatalogEntry]
    base_id: int
    class_tol: float

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("catalog entry names must be unique")

    def validate(self, space: SampledSpace, tol: float):
        """Candidates must be 1-Lipschitz and pairwise distinct classes."""
        for e in self.entries:
            ok, worst, edge = is_lipschitz1(SampledFunction(e.values, self.base_id),
                                            space, tol)
            if not ok:
                raise ValueError(f"candidate {e.name} violates the Lipschitz "
                                 f"bound by {worst:.3g} at edge {edge}")
        for i, a in enumerate(self.entries):
            for b in self.entries[i + 1:]:
                if self._same_class(a.values, b.values):
                    raise ValueError(f"candidates {a.name} and {b.name} "
                                     "coincide as classes")

    def _same_class(self, f: np.ndarray, g: np.ndarray) -> bool:
        diff = f - g
        return float(diff.max() - diff.min()) <= self.class_tol


def liminf_fn(seq: Sequence[np.ndarray], trim: bool = True) -> np.ndarray:
    """Per-sample tail liminf (window minimum, bottom quarter trimmed)."""
    return _window_extreme(seq, low=True, trim=trim)


def limsup_fn(seq: Sequence[np.ndarray], trim: bool = True) -> np.ndarray:
    """Per-sample tail limsup (window maximum, top quarter trimmed)."""
    return _window_extreme(seq, low=False, trim=trim)


def _window_extreme(seq, low: bool, trim: bool) -> np.ndarray:
    if len(seq) < 8:
        raise ValueError("need at least 8 terms")
    vals = np.stack([np.asarray(f, dtype=float) for f in seq])
    w = max(4, math.ceil(len(seq) / 4))
    tail = np.sort(vals[-w:], axis=0)
    k = max(1, w // 4) if trim else 0
    return tail[k] if low else tail[w - 1 - k]


def settled_mask(seq: Sequence[np.ndarray], tol: float) -> np.ndarray:
    """Samples carrying limit information in their tail window.

    Kept: windows with trimmed spread within tol (settled, one-pass spikes
    absorbed by the trim), and genuinely oscillating windows (two or more
    direction changes), whose split between liminf and limsup is real.
    Excluded: monotone or single-turn windows, which an escaping tail
    produces at samples it has not finished passing.
    """
    vals = np.stack([np.asarray(f, dtype=float) for f in seq])
    w = max(4, math.ceil(len(seq) / 4))
    tail = vals[-w:]
    srt = np.sort(tail, axis=0)
    k = max(1, w // 4)
    spread = srt[w - 1 - k] - srt[k]
    settled = spread <= tol

    diffs = np.diff(tail, axis=0)
    signs = np.where(diffs > tol / 2, 1, np.where(diffs < -tol / 2, -1, 0))
    turns = np.zeros(tail.shape[1], dtype=int)
    prev = np.zeros(tail.shape[1], dtype=int)
    for row in signs:
        flip = (row != 0) & (prev != 0) & (row != prev)
        turns += flip
        prev = np.where(row != 0, row, prev)
    oscillating = turns >= 2
    return settled | oscillating


@dataclass
class LhatResult:
    members: list[str]
    member_functions: dict
    liminf: np.ndarray
    limsup: np.ndarray
    hausdorff_witness: bool
    diagnostics: dict = field(default_factory=dict)

    def to_json(self, path, space: SampledSpace, base_dir=None):
        import pathlib
        path = pathlib.Path(path)
        lim_csv = path.with_suffix(".liminf.csv")
        sup_csv = path.with_suffix(".limsup.csv")
        write_function_csv(lim_csv, space, SampledFunction(self.liminf, 0))
        write_function_csv(sup_csv, space, SampledFunction(self.limsup, 0))
        payload = {"members": self.members,
                   "hausdorff_witness": self.hausdorff_witness,
                   "liminf_csv": lim_csv.name, "limsup_csv": sup_csv.name,
                   "diagnostics": {k: v for k, v in self.diagnostics.items()}}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True))


def in_Lhat(f: np.ndarray, seq: Sequence[np.ndarray], catalog: FunctionCatalog,
            tol: float, mask: np.ndarray | None = None) -> bool:
    """Chronological-limit membership of a single function against the
    catalog universe (all real shifts of every catalog class)."""
    f = np.asarray(f, dtype=float)
    li = liminf_fn(seq)
    ls = limsup_fn(seq)
    m = settled_mask(seq, tol) if mask is None else mask
    return _in_Lhat_pre(f, li, ls, catalog, tol, m)


def _in_Lhat_pre(f, li, ls, catalog: FunctionCatalog, tol: float,
                 mask: np.ndarray) -> bool:
    if not mask.any():
        return False
    if float((f - li)[mask].max()) > tol:
        return False                       # (a) fails
    if float((ls - f)[mask].min()) > tol:
        return False                       # blocked by its own upward shift
    for entry in catalog.entries:
        if catalog._same_class(entry.values[mask], f[mask]):
            continue
        k_lo = float((f - entry.values)[mask].max())
        k_hi = float((ls - entry.values)[mask].min())
        if k_lo <= k_hi + tol:
            g = entry.values + min(k_lo + tol, k_hi)
            if float(np.abs(g - f)[mask].max()) > tol:
                return False               # (b) fails: strict in-between fit
    return True


def chr_limits(seq: Sequence[np.ndarray], catalog: FunctionCatalog,
               tol: float) -> LhatResult:
    """All catalog classes with a shift in the L-hat set of the sequence.

    Per class only the maximal shift under the liminf can qualify, so the
    search is one candidate per class.  Two or more members witness the
    failure of unique limits (non-Hausdorff behaviour).
    """
    li = liminf_fn(seq)
    ls = limsup_fn(seq)
    mask = settled_mask(seq, tol)
    members, funcs, diags = [], {}, {}
    for entry in catalog.entries:
        k_max = float((li - entry.values)[mask].min()) if mask.any() else -math.inf
        cand = entry.values + k_max
        ok = _in_Lhat_pre(cand, li, ls, catalog, tol, mask)
        diags[entry.name] = {"k_max": k_max, "member": bool(ok)}
        if ok:
            members.append(entry.name)
            funcs[entry.name] = cand
    return LhatResult(members=members, member_functions=funcs,
                      liminf=li, limsup=ls,
                      hausdorff_witness=len(members) >= 2,
                      diagnostics=diags)


def check_Ldual(f: np.ndarray, seq: Sequence[np.ndarray],
                catalog: FunctionCatalog, tol: float,
                mask: np.ndarray | None = None) -> bool:
    """Backward mirror: f >= limsup f_n, and nothing in the universe fits
    strictly between the liminf and f."""
    f = np.asarray(f, dtype=float)
    li = liminf_fn(seq)
    ls = limsup_fn(seq)
    m = settled_mask(seq, tol) if mask is None else mask
    return _in_Ldual_pre(f, li, ls, catalog, tol, m)


def _in_Ldual_pre(f, li, ls, catalog: FunctionCatalog, tol: float,
                  mask: np.ndarray) -> bool:
    if not mask.any():
        return False
    if float((ls - f)[mask].max()) > tol:
        return False
    if float((f - li)[mask].min()) > tol:
        return False
    for entry in catalog.entries:
        if catalog._same_class(entry.values[mask], f[mask]):
            continue
        # feasible k with liminf <= h + k <= f
        k_lo = float((li - entry.values)[mask].max())
        k_hi = float((f - entry.values)[mask].min())
        if k_lo <= k_hi + tol:
            g = entry.values + min(k_lo + tol, k_hi)
            if float(np.abs(g - f)[mask].max()) > tol:
                return False
    return True


def chr_limits_dual(seq: Sequence[np.ndarray], catalog: FunctionCatalog,
                    tol: float) -> LhatResult:
    li = liminf_fn(seq)
    ls = limsup_fn(seq)
    mask = settled_mask(seq, tol)
    members, funcs, diags = [], {}, {}
    for entry in catalog.entries:
        k_min = float((ls - entry.values)[mask].max()) if mask.any() else math.inf
        cand = entry.values + k_min
        ok = _in_Ldual_pre(cand, li, ls, catalog, tol, mask)
        diags[entry.name] = {"k_min": k_min, "member": bool(ok)}
        if ok:
            members.append(entry.name)
            funcs[entry.name] = cand
    return LhatResult(members=members, member_functions=funcs,
                      liminf=li, limsup=ls,
                      hausdorff_witness=len(members) >= 2,
                      diagnostics=diags)


def lifted_sequence(space: SampledSpace, ids: Sequence[int],
                    base_id: int) -> list[np.ndarray]:
    """The canonical lift of a point sequence: f_n = -d(., x_n), each
    normalized at the base point."""
    ids = [int(i) for i in ids]
    rows = space.dist_to(ids)            # (k, n): d(., x_k)
    out = []
    for k in range(len(ids)):
        f = -rows[k]
        out.append(f - f[base_id])
    return out
