#!/usr/bin/env python3
"""Hoelder sandwich scan: rho_a^alpha / w(phi xi - phi eta) over seeded
vertex pairs, one row per depth. A bounded max/min across depths is the
empirical signature of the boundary map being a w-bi-Lipschitz image of the
visual metric."""

import argparse

from selfaffine import LazyTree, PseudoNormEvaluator, compute_neighbors, validate_system
from selfaffine.augmented_tree import holder_scan
from selfaffine.files import load_fixture, parse_spec

BUILTIN = {"cantor": ([[3]], [[0], [2]]), "dyadic": ([[2]], [[0], [1]])}


def load(name):
    if name in BUILTIN:
        return validate_system(*BUILTIN[name])
    if name in ("d1", "d2", "d3"):
        return load_fixture(name).to_system()
    return parse_spec(name).to_system()


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("system", help="cantor, dyadic, d1, d2, d3 or a system file")
    p.add_argument("--depths", default="6-10", help="inclusive range, e.g. 6-10")
    p.add_argument("--pairs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-a", type=float, default=0.5, help="visual-metric parameter")
    p.add_argument("--mode", choices=["sharp", "mollified"], default="sharp")
    args = p.parse_args()

    lo, _, hi = args.depths.partition("-")
    depths = range(int(lo), int(hi or lo) + 1)
    s = load(args.system)
    ns = compute_neighbors(s)
    lazy = LazyTree(s, ns)
    ev = PseudoNormEvaluator(s, mode=args.mode)

    print(f"{'depth':>5} {'min':>12} {'max':>12} {'max/min':>9}")
    scans = []
    for depth in depths:
        sc = holder_scan(s, lazy, ev, args.a, args.pairs, args.seed, depth)
        scans.append(sc)
        print(f"{depth:>5} {sc.ratio_min:>12.6g} {sc.ratio_max:>12.6g} {sc.ratio_max / sc.ratio_min:>9.3f}")
    spread = max(x.ratio_max for x in scans) / min(x.ratio_min for x in scans)
    print(f"alpha = {scans[0].alpha:.6f}; overall max/min = {spread:.3f}")


if __name__ == "__main__":
    main()
