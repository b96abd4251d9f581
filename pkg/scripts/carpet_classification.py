#!/usr/bin/env python3
"""Classify the three shipped diag(3,4) carpets end to end.

For each system: residue certificate, neighbor set, simplicity verdict and
dimensions; then pairwise w-Lipschitz equivalence with the Euclidean
dimension obstruction.
"""

import argparse
import itertools
import json
import time

from selfaffine import compute_neighbors, decide_equivalence, decide_simplicity, dimension_report, residue_check
from selfaffine.files import load_fixture, parse_spec


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("specs", nargs="*", help="system files (default: shipped d1, d2, d3)")
    p.add_argument("--json", action="store_true", help="print one JSON object instead of a table")
    args = p.parse_args()

    start = time.perf_counter()
    specs = [parse_spec(s) for s in args.specs] or [load_fixture(k) for k in ("d1", "d2", "d3")]
    rows, systems, verdicts = [], [], []
    for spec in specs:
        s = spec.to_system()
        ns = compute_neighbors(s)
        v = decide_simplicity(s, ns, spec.to_limits(), spec.assert_osc)
        dims = dimension_report(s, spec.assert_osc)
        rows.append({"label": spec.label, "N": s.n_digits, "residues_distinct": residue_check(s).distinct_residues,
                     "neighbors": len(ns), "status": v.status.value, "types": len(v.types),
                     "w_dim": dims.w_dim, "hausdorff_dim": dims.hausdorff_dim, "bounds": list(dims.bounds)})
        systems.append(s)
        verdicts.append(v)

    pairs = []
    for i, j in itertools.combinations(range(len(systems)), 2):
        rep = decide_equivalence(systems[i], systems[j], verdicts[i], verdicts[j])
        pairs.append({"pair": [rows[i]["label"], rows[j]["label"]], "w_equivalent": rep.w_equivalent.value,
                      "euclidean_lipschitz": rep.euclidean_lipschitz.value,
                      "obstruction": list(rep.euclidean_obstruction) if rep.euclidean_obstruction else None})
    elapsed = time.perf_counter() - start

    if args.json:
        print(json.dumps({"systems": rows, "pairs": pairs, "seconds": round(elapsed, 3)}, indent=2))
        return
    print(f"{'system':8} {'N':>2} {'OSC':>4} {'|Delta|':>7} {'status':>12} {'types':>5} "
          f"{'w-dim':>12} {'dim_H':>12} {'bracket':>24}")
    for r in rows:
        h = f"{r['hausdorff_dim']:.10f}" if r["hausdorff_dim"] is not None else "-"
        lo, hi = r["bounds"]
        print(f"{str(r['label']):8} {r['N']:>2} {'yes' if r['residues_distinct'] else 'no':>4} {r['neighbors']:>7} "
              f"{r['status']:>12} {r['types']:>5} {r['w_dim']:>12.10f} {h:>12} ({lo:.6f}, {hi:.6f})")
    print()
    for q in pairs:
        obs = "" if q["obstruction"] is None else f"  dim_H {q['obstruction'][0]:.7f} != {q['obstruction'][1]:.7f}"
        print(f"{q['pair'][0]} ~ {q['pair'][1]}: w-equivalent {q['w_equivalent']}, "
              f"Euclidean-Lipschitz {q['euclidean_lipschitz']}{obs}")
    print(f"\n{elapsed:.2f} s")


if __name__ == "__main__":
    main()
