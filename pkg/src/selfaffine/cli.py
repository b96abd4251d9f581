"""Command-line front end.

    selfaffine validate SPEC
    selfaffine neighbors SPEC [--edges K|box]
    selfaffine graph SPEC --depth L [--format dot|records] -o OUT
    selfaffine simplicity SPEC [--limits k=v,...] [--assert-osc] [--export OUT]
    selfaffine dimension SPEC
    selfaffine equiv SPEC1 SPEC2
    selfaffine render SPEC --depth L --size WxH -o OUT.ppm
    selfaffine report SPEC... [--depth L] [--seed S] [--mode sharp|mollified] -o OUT.json
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import dimension, equivalence, simplicity
from .affine_core import residue_check
from .augmented_tree import expand
from .errors import SelfAffineError
from .files import (atomic_write, cached_neighbor_set, export_graph, graph_to_dot, graph_to_records, parse_spec,
                    render, resolve_cache_dir, store_neighbors, verdict_to_records)
from .report import ReportConfig, report_json, run_report


def parse_limits(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in ("max_types", "max_cardinality", "max_rounds") or not value.strip().isdigit():
            raise argparse.ArgumentTypeError(f"bad limit {item!r}; use max_types=..,max_cardinality=..,max_rounds=..")
        out[key] = int(value)
    return out


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 81x256, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("size must be positive")
    return w, h


def _emit(data, out):
    text = json.dumps(data, indent=2) + "\n"
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _load(args, path):
    spec = parse_spec(path)
    if getattr(args, "assert_osc", False):
        spec.assert_osc = True
    if getattr(args, "limits", None):
        spec.limits = {**(spec.limits or {}), **args.limits}
    return spec, spec.to_system()


def cmd_validate(args):
    spec, s = _load(args, args.spec)
    res = residue_check(s)
    _emit({"label": spec.label, "d": s.dim, "N": s.n_digits, "q": s.q, "lambda0": s.lambda0,
           "lambda1": s.lambda1, "k_star": s.contraction.k_star, "theta": s.contraction.theta,
           "bounding_radius": s.bounding_radius, "distinct_residues": res.distinct_residues,
           "complete_system": res.complete_system}, args.output)


def cmd_neighbors(args):
    _, s = _load(args, args.spec)
    ns = cached_neighbor_set(s, args.edges, args.cache_dir)
    _emit({"mode": ns.mode, "size": len(ns), "vectors": [list(t) for t in sorted(ns.vectors)]}, args.output)


def cmd_graph(args):
    _, s = _load(args, args.spec)
    ns = cached_neighbor_set(s, args.edges, args.cache_dir)
    tree = expand(s, ns, args.depth)
    if args.output:
        export_graph(tree, args.format, args.output)
    else:
        sys.stdout.write(graph_to_dot(tree) if args.format == "dot" else graph_to_records(tree))


def cmd_simplicity(args):
    spec, s = _load(args, args.spec)
    ns = cached_neighbor_set(s, "K", args.cache_dir)
    verdict = simplicity.decide(s, ns, spec.to_limits(), spec.assert_osc)
    if args.export:
        atomic_write(args.export, verdict_to_records(verdict))
    directory = resolve_cache_dir(args.cache_dir)
    if directory is not None:
        store_neighbors(ns, directory, verdict)
    _emit({"status": verdict.status.value, "types": len(verdict.types), "rounds": verdict.rounds,
           "max_cardinality_per_round": verdict.max_cardinality_per_round, "reason": verdict.reason,
           "conclusions": verdict.conclusions}, args.output)


def cmd_dimension(args):
    spec, s = _load(args, args.spec)
    rep = dimension.dimension_report(s, spec.assert_osc)
    _emit({"w_dim": rep.w_dim, "hausdorff_dim": rep.hausdorff_dim, "bounds": list(rep.bounds),
           "assumptions": rep.assumptions}, args.output)


def cmd_equiv(args):
    (sp1, s1), (sp2, s2) = _load(args, args.spec1), _load(args, args.spec2)
    verdicts = []
    for sp, s in ((sp1, s1), (sp2, s2)):
        ns = cached_neighbor_set(s, "K", args.cache_dir)
        verdicts.append(simplicity.decide(s, ns, sp.to_limits(), sp.assert_osc))
    rep = equivalence.decide(s1, s2, *verdicts, assert_osc=(sp1.assert_osc, sp2.assert_osc))
    _emit({"w_equivalent": rep.w_equivalent.value, "nearly_lipschitz": rep.nearly_lipschitz.value,
           "euclidean_obstruction": list(rep.euclidean_obstruction) if rep.euclidean_obstruction else None,
           "euclidean_lipschitz": rep.euclidean_lipschitz.value,
           "evidence": rep.evidence, "notes": rep.notes}, args.output)


def cmd_render(args):
    _, s = _load(args, args.spec)
    w, h = args.size
    img = render(s, args.depth, w, h, args.output)
    print(f"wrote {args.output}: {w}x{h}, {int(img.sum())} filled pixels", file=sys.stderr)


def cmd_report(args):
    specs = []
    for path in args.specs:
        spec, _ = _load(args, path)
        specs.append(spec)
    cfg = ReportConfig(depth=args.depth, seed=args.seed, mode=args.mode, cache_dir=args.cache_dir)
    text = report_json(run_report(specs, cfg))
    if args.output:
        atomic_write(args.output, text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", default=None,
                        help="neighbor-set cache directory (default: $SELFAFFINE_CACHE_DIR, else no cache)")
    common.add_argument("--assert-osc", action="store_true",
                        help="assume the open set condition when residues do not certify it")
    common.add_argument("--limits", type=parse_limits, default=None,
                        help="simplicity limits, e.g. max_types=1000,max_cardinality=200,max_rounds=20")
    common.add_argument("-o", "--output", default=None)

    p = argparse.ArgumentParser(prog="selfaffine", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("validate", parents=[common], help="check a system file and print derived constants")
    q.add_argument("spec")
    q.set_defaults(func=cmd_validate)

    q = sub.add_parser("neighbors", parents=[common], help="compute the neighbor set")
    q.add_argument("spec")
    q.add_argument("--edges", choices=["K", "box"], default="K")
    q.set_defaults(func=cmd_neighbors)

    q = sub.add_parser("graph", parents=[common], help="export the augmented tree to a given depth")
    q.add_argument("spec")
    q.add_argument("--depth", type=int, default=3)
    q.add_argument("--format", choices=["dot", "records"], default="dot")
    q.add_argument("--edges", choices=["K", "box"], default="K")
    q.set_defaults(func=cmd_graph)

    q = sub.add_parser("simplicity", parents=[common], help="decide simplicity by closing component types")
    q.add_argument("spec")
    q.add_argument("--export", default=None, help="write the type/transition certificate as JSON lines")
    q.set_defaults(func=cmd_simplicity)

    q = sub.add_parser("dimension", parents=[common], help="w-dimension, McMullen dimension and bounds")
    q.add_argument("spec")
    q.set_defaults(func=cmd_dimension)

    q = sub.add_parser("equiv", parents=[common], help="w-Lipschitz equivalence of two systems")
    q.add_argument("spec1")
    q.add_argument("spec2")
    q.set_defaults(func=cmd_equiv)

    q = sub.add_parser("render", parents=[common], help="draw the level-L approximation as a PPM")
    q.add_argument("spec")
    q.add_argument("--depth", type=int, default=4)
    q.add_argument("--size", type=parse_size, default=(81, 256))
    q.set_defaults(func=cmd_render)

    q = sub.add_parser("report", parents=[common], help="full analysis report (JSON)")
    q.add_argument("specs", nargs="+")
    q.add_argument("--depth", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--mode", choices=["sharp", "mollified"], default="sharp", help="pseudo-norm variant")
    q.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "render" and not args.output:
        print("render needs -o OUT.ppm", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except SelfAffineError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
