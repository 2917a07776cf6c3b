"""Command-line front end.

Subcommands: build, dist, busemann, classify-seq, dq-matrix, chr-limits,
cboundary, run-example, list-examples.  Exit codes: 0 all verdicts pass,
1 a verdict failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .busemann import busemann_eval, curve_from_annotation, curve_from_ids
from .chrono import CatalogEntry, FunctionCatalog, chr_limits, lifted_sequence
from .completion import (PointSequence, build_catalog, classify_boundary_point,
                         is_alternative_cauchy, is_forward_cauchy)
from .graph import BuildError, SampledSpace, SpaceSpec, build_graph
from .gromov import SampledFunction, write_function_csv
from .metric import write_matrix_csv
from .scenarios import RUNNERS, run_scenario
from .spaces import BUILDERS, build_example
from .spacetime import assemble_boundary, fermat_graphs


class InputError(ValueError):
    pass


def _load_space(args) -> SampledSpace:
    """A space comes either from a named builder or a grid space spec."""
    path = Path(args.space)
    if not path.exists() and args.space in BUILDERS:
        space, _ = build_example(args.space, _builder_params(args))
        return space
    if not path.exists():
        raise InputError(f"no such space spec or builder: {args.space}")
    with open(path) as fh:
        data = json.load(fh)
    if data.get("kind") in BUILDERS:
        params = dict(data.get("params", {}))
        params.update(_builder_params(args))
        space, _ = build_example(data["kind"], params)
        return space
    spec = SpaceSpec.from_dict(data)
    if args.resolution is not None:
        spec = SpaceSpec(**{**spec.__dict__, "resolution": args.resolution})
    return build_graph(spec)


def _builder_params(args) -> dict:
    params = {}
    if getattr(args, "truncation", None) is not None:
        params["T"] = args.truncation
    if getattr(args, "resolution", None) is not None:
        params["h"] = args.resolution
    return params


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_build(args) -> int:
    space = _load_space(args)
    out = _out_dir(args)
    rows, cols, w = space.edge_arrays()
    summary = {
        "kind": space.spec.kind,
        "chart": space.chart,
        "nodes": int(space.n),
        "directed_edges": int(len(w)),
        "grid_step": space.h,
        "min_edge_weight": float(w.min()),
        "max_edge_weight": float(w.max()),
        "annotations": {
            "sequences": sorted(space.annotations.get("sequences", {})),
            "curves": sorted(space.annotations.get("curves", {})),
        },
    }
    (out / "build_summary.json").write_text(json.dumps(summary, indent=2,
                                                       sort_keys=True))
    with open(out / "points.csv", "w") as fh:
        dim = space.points.shape[1]
        fh.write("id," + ",".join(f"coord{k}" for k in range(dim)) + "\n")
        for i in range(space.n):
            fh.write(f"{i}," + ",".join(repr(float(c)) for c in space.points[i]) + "\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_dist(args) -> int:
    space = _load_space(args)
    out = _out_dir(args)
    row = space.dist_from([args.from_id])[0]
    targets = args.to_ids if args.to_ids else list(range(space.n))
    if args.format == "json":
        payload = {str(t): (None if math.isinf(row[t]) else float(row[t]))
                   for t in targets}
        (out / "dist.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    else:
        write_matrix_csv(out / "dist.csv", row[targets][None, :],
                         labels=None)
    print(f"wrote distances from {args.from_id} to {len(targets)} targets")
    return 0


def cmd_busemann(args) -> int:
    space = _load_space(args)
    out = _out_dir(args)
    if args.curve:
        curve = curve_from_annotation(space, args.curve)
    elif args.curve_csv:
        rows = np.loadtxt(args.curve_csv, delimiter=",", skiprows=1, ndmin=2)
        ids = [space.nearest_id(r[1:]) for r in rows]
        curve = curve_from_ids(space, ids)
    else:
        raise InputError("need --curve NAME or --curve-csv FILE")
    b = busemann_eval(curve, space)
    if b.values is None:
        print("busemann function is identically infinite (apex probe)")
        return 0
    write_function_csv(out / "busemann.csv", space,
                       SampledFunction(b.values, space.annotations.get("base_id", 0)))
    print(f"kind: {b.kind}; wrote {out / 'busemann.csv'}")
    return 0


def cmd_classify_seq(args) -> int:
    space = _load_space(args)
    seqs = space.annotations.get("sequences", {})
    if args.seq not in seqs:
        raise InputError(f"unknown sequence {args.seq!r}; have {sorted(seqs)}")
    sigma = PointSequence(seqs[args.seq], source=args.seq)
    fwd = is_forward_cauchy(sigma, space)
    alt = is_alternative_cauchy(sigma, space)
    cls = None
    try:
        cls = classify_boundary_point(sigma, space).kind
    except ValueError:
        cls = "unclassified"
    payload = {"sequence": args.seq, "forward_cauchy": fwd.passed,
               "alternative_cauchy": alt.passed, "kind": cls}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_dq_matrix(args) -> int:
    space = _load_space(args)
    out = _out_dir(args)
    cat = build_catalog(space, tol=args.tol)
    names = cat.names + [f"pt{js}" for js in cat.interior_ids]
    write_matrix_csv(out / "dq_matrix.csv", cat.dq, labels=names)
    payload = {"classes": [{"name": c.name, "kind": c.kind,
                            "limit_id": c.limit_id} for c in cat.classes],
               "interior_ids": cat.interior_ids,
               "matrix_csv": "dq_matrix.csv"}
    (out / "catalog.json").write_text(json.dumps(payload, indent=2, sort_keys=True))
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_chr_limits(args) -> int:
    space = _load_space(args)
    out = _out_dir(args)
    seqs = space.annotations.get("sequences", {})
    if args.seq not in seqs:
        raise InputError(f"unknown sequence {args.seq!r}; have {sorted(seqs)}")
    base = space.annotations.get("base_id", 0)
    entries = []
    for name in sorted(space.annotations.get("curves", {})):
        if name.endswith("_bwd"):
            continue
        b = busemann_eval(curve_from_annotation(space, name), space)
        if b.kind != "infinite":
            entries.append(CatalogEntry(name, b.values))
    if not entries:
        raise InputError("space has no finite Busemann probe curves")
    cat = FunctionCatalog(entries, base, class_tol=args.tol)
    seq = lifted_sequence(space, seqs[args.seq], base)
    res = chr_limits(seq, cat, tol=args.tol)
    res.to_json(out / "chr_limits.json", space)
    print(json.dumps({"members": res.members,
                      "hausdorff_witness": res.hausdorff_witness},
                     indent=2, sort_keys=True))
    return 0


def cmd_cboundary(args) -> int:
    space = _load_space(args)
    out = _out_dir(args)
    cat = build_catalog(space, tol=min(args.tol, 0.05))
    rep = assemble_boundary(fermat_graphs(space), cat, tol=args.tol)
    rep.write_json(out / "cboundary.json")
    rep.write_dot(out / "pairing.dot")
    print(json.dumps(rep.to_json_dict(), indent=2, sort_keys=True))
    return 0


def cmd_run_example(args) -> int:
    kwargs = {}
    res = run_scenario(args.name, **kwargs)
    out = _out_dir(args)
    payload = {"scenario": res.scenario, "passed": res.passed,
               "verdicts": res.verdicts, "values": res.values,
               "seconds": res.seconds}
    (out / f"{res.scenario}.json").write_text(json.dumps(payload, indent=2,
                                                         sort_keys=True))
    for line in res.lines():
        print(line)
    return 0 if res.passed else 1


def cmd_list_examples(args) -> int:
    print("builders:")
    for name in sorted(BUILDERS):
        print(f"  {name}")
    print("scenarios:")
    for name in sorted(RUNNERS):
        print(f"  {name}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="finbound",
                                 description="sampled Randers spaces: "
                                 "completions and causal boundaries")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, space=True):
        if space:
            p.add_argument("--space", required=True,
                           help="space spec JSON path or builder name")
            p.add_argument("--resolution", type=float, default=None)
            p.add_argument("--truncation", type=float, default=None)
        p.add_argument("--out-dir", default="out")
        p.add_argument("--tol", type=float, default=0.25)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("build", help="build a space and persist a summary")
    common(p)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("dist", help="single-source distances")
    common(p)
    p.add_argument("--from-id", type=int, required=True)
    p.add_argument("--to-ids", type=int, nargs="*", default=None)
    p.set_defaults(fn=cmd_dist)

    p = sub.add_parser("busemann", help="evaluate a curve's Busemann function")
    common(p)
    p.add_argument("--curve", default=None, help="annotated curve name")
    p.add_argument("--curve-csv", default=None,
                   help="CSV of (s, coordinates) rows")
    p.set_defaults(fn=cmd_busemann)

    p = sub.add_parser("classify-seq", help="Cauchy classification of an "
                       "annotated sequence")
    common(p)
    p.add_argument("--seq", required=True)
    p.set_defaults(fn=cmd_classify_seq)

    p = sub.add_parser("dq-matrix", help="quasi-distance matrix over the "
                       "boundary catalog")
    common(p)
    p.set_defaults(fn=cmd_dq_matrix)

    p = sub.add_parser("chr-limits", help="chronological limits of an "
                       "annotated sequence")
    common(p)
    p.add_argument("--seq", required=True)
    p.set_defaults(fn=cmd_chr_limits)

    p = sub.add_parser("cboundary", help="assemble the causal boundary")
    common(p)
    p.set_defaults(fn=cmd_cboundary)

    p = sub.add_parser("run-example", help="run a named scenario")
    p.add_argument("name", choices=sorted(RUNNERS))
    common(p, space=False)
    p.set_defaults(fn=cmd_run_example)

    p = sub.add_parser("list-examples", help="list builders and scenarios")
    p.set_defaults(fn=cmd_list_examples)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, BuildError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
