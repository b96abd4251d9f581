"""Consolidated analysis report.  Every claim records how it is backed:

* ``certificate``       an exact computation that can be re-checked
* ``empirical``         a seeded, finite-sample measurement
* ``theorem-citation``  a value or conclusion taken from a named theorem,
                        valid under the hypotheses listed next to it
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import dimension, equivalence, simplicity
from .affine_core import AffineSystem, residue_check
from .augmented_tree import (degree_stats, augmented_tree_violations, components, default_visual_parameter,
                             expand, holder_scan, hyperbolicity_report)
from .files import SystemSpec, atomic_write, cached_neighbor_set
from .neighbor_set import verify_fixed_point
from .pseudo_norm import PseudoNormEvaluator

REPORT_FORMAT = "selfaffine.report/1"

THEOREMS = {
    "residue_osc": "distinct residues modulo A Z^d give the open set condition",
    "w_dimension": "w-Hausdorff dimension formula d ln N / ln q under the open set condition",
    "mcmullen": "McMullen-Bedford dimension formula for diagonal carpets",
    "bracket": "comparison of w-dimension and Hausdorff dimension through the extreme eigenvalue moduli",
    "hyperbolic": "the graph induced by (A, D) is a hyperbolic augmented tree with bounded degree",
    "holder": "Hoelder equivalence of the hyperbolic boundary and K",
    "disconnected": "K is totally disconnected iff the augmented tree is simple (open set condition)",
    "cantor": "simple augmented trees have boundary bi-Lipschitz to the N-ary tree boundary",
    "classification": "w-Lipschitz classification: totally disconnected attractors with the open set "
                      "condition and common A are w-Lipschitz equivalent iff #D1 = #D2",
    "nearly": "w-Lipschitz equivalence gives nearly Lipschitz equivalence when all eigenvalue moduli agree",
}


@dataclass
class ReportConfig:
    depth: int = 4
    seed: int = 0
    mode: str = "sharp"
    triples: int = 200
    holder_pairs: int = 100
    holder_a: float = 0.5
    limits: simplicity.Limits = field(default_factory=simplicity.Limits)
    cache_dir: str | None = None


def _claim(value, evidence: str, **extra) -> dict:
    out = {"value": value, "evidence": evidence}
    out.update(extra)
    return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    return x


def system_section(spec: SystemSpec, system: AffineSystem, cfg: ReportConfig):
    res = residue_check(system)
    osc = simplicity.osc_certified(system, spec.assert_osc)
    section: dict = {
        "label": spec.label,
        "system": {
            "matrix": [list(r) for r in system.matrix],
            "digits": [list(d) for d in system.digits],
            "N": system.n_digits,
            "q": system.q,
            "lambda0": system.lambda0,
            "lambda1": system.lambda1,
            "k_star": system.contraction.k_star,
            "theta": system.contraction.theta,
            "bounding_radius": system.bounding_radius,
        },
        "osc": {
            "distinct_residues": _claim(res.distinct_residues, "certificate"),
            "complete_system": _claim(res.complete_system, "certificate"),
            "open_set_condition": (
                _claim(True, "theorem-citation", theorem=THEOREMS["residue_osc"]) if res.distinct_residues
                else _claim(True, "theorem-citation", theorem="asserted in the system file") if osc
                else _claim(False, "certificate", note="digit residues collide; no assertion given")),
        },
    }
    ns = cached_neighbor_set(system, "K", cfg.cache_dir)
    section["neighbor_set"] = _claim(
        {"size": len(ns), "vectors": [list(t) for t in sorted(ns.vectors)]}, "certificate",
        check="greatest fixed point of t -> A t - e re-verified" if verify_fixed_point(ns) else "FAILED")

    tree = expand(system, ns, cfg.depth)
    deg = degree_stats(tree)
    section["graph"] = _claim({
        "depth": cfg.depth,
        "vertices_per_level": [len(s) for s in tree.slices],
        "horizontal_edges_per_level": [len(s.horizontal_edges) for s in tree.slices],
        "components_per_level": [len(components(s)) for s in tree.slices],
        "max_degree_per_level": deg["per_level_max"],
        "augmented_tree_axiom_violations": len(augmented_tree_violations(tree)),
    }, "certificate", scope=f"exhaustive to level {cfg.depth}")

    hyp = hyperbolicity_report(tree, cfg.triples, cfg.seed)
    a = default_visual_parameter(hyp.delta_hat)
    section["hyperbolicity"] = {
        "delta_hat": _claim(str(hyp.delta_hat), "empirical", triples=cfg.triples, seed=cfg.seed),
        "max_horizontal_geodesic": _claim(hyp.max_horizontal_geodesic, "empirical"),
        "visual_parameter": a,
        "hyperbolic": _claim(True, "theorem-citation", theorem=THEOREMS["hyperbolic"]),
    }
    ev = PseudoNormEvaluator(system, cfg.mode)
    scan = holder_scan(system, tree, ev, cfg.holder_a, cfg.holder_pairs, cfg.seed, cfg.depth)
    section["holder"] = _claim({"a": scan.a, "alpha": scan.alpha, "ratio_min": scan.ratio_min,
                                "ratio_max": scan.ratio_max, "pairs": scan.pairs, "pseudo_norm": cfg.mode},
                               "empirical", theorem=THEOREMS["holder"])

    verdict = None
    if osc:
        limits = spec.to_limits() if spec.limits else cfg.limits
        verdict = simplicity.decide(system, ns, limits, spec.assert_osc)
        sim = {
            "status": _claim(verdict.status.value, "certificate",
                             check="closure re-verified" if verdict.simple and
                             simplicity.verify_verdict(system, ns, verdict) else verdict.reason),
            "types": len(verdict.types),
            "rounds": verdict.rounds,
            "max_cardinality_per_round": verdict.max_cardinality_per_round,
        }
        if verdict.simple:
            sim["conclusions"] = [
                _claim("K is totally disconnected", "theorem-citation", theorem=THEOREMS["disconnected"]),
                _claim(f"boundary is a {system.n_digits}-Cantor set up to bi-Lipschitz maps",
                       "theorem-citation", theorem=THEOREMS["cantor"]),
            ]
        section["simplicity"] = sim
        rep = dimension.dimension_report(system, spec.assert_osc)
        section["dimension"] = {
            "w_dim": _claim(rep.w_dim, "theorem-citation", theorem=THEOREMS["w_dimension"]),
            "hausdorff_dim": (_claim(rep.hausdorff_dim, "theorem-citation", theorem=THEOREMS["mcmullen"])
                              if rep.hausdorff_dim is not None else None),
            "bounds": _claim(list(rep.bounds), "theorem-citation", theorem=THEOREMS["bracket"]),
            "assumptions": rep.assumptions,
        }
    else:
        section["simplicity"] = {"status": _claim("not run", "certificate",
                                                  reason="open set condition not certified")}
        section["dimension"] = None
    return section, verdict


def equivalence_section(pair, systems, specs, verdicts) -> dict:
    i, j = pair
    label = [specs[k].label or f"system{k}" for k in pair]
    if systems[i].matrix != systems[j].matrix:
        return {"systems": label, "w_equivalent": None, "notes": ["different matrices: not comparable"]}
    if verdicts[i] is None or verdicts[j] is None:
        return {"systems": label, "w_equivalent": _claim("Unknown", "certificate"),
                "notes": ["open set condition not established"]}
    rep = equivalence.decide(systems[i], systems[j], verdicts[i], verdicts[j],
                             (specs[i].assert_osc, specs[j].assert_osc))
    out = {
        "systems": label,
        "w_equivalent": _claim(rep.w_equivalent.value, "theorem-citation", theorem=THEOREMS["classification"]),
        "nearly_lipschitz": _claim(rep.nearly_lipschitz.value, "theorem-citation", theorem=THEOREMS["nearly"]),
        "euclidean_obstruction": (_claim(list(rep.euclidean_obstruction), "theorem-citation",
                                         theorem=THEOREMS["mcmullen"])
                                  if rep.euclidean_obstruction else None),
        "euclidean_lipschitz": _claim(rep.euclidean_lipschitz.value,
                                      "theorem-citation" if rep.euclidean_obstruction else "certificate",
                                      **({"theorem": "Hausdorff dimension is a bi-Lipschitz invariant"}
                                         if rep.euclidean_obstruction else {"reason": "no known obstruction"})),
        "evidence": rep.evidence,
        "notes": rep.notes,
    }
    return out


def run_report(specs: list[SystemSpec], cfg: ReportConfig | None = None) -> dict:
    cfg = cfg or ReportConfig()
    systems = [s.to_system() for s in specs]
    sections, verdicts = [], []
    for spec, system in zip(specs, systems):
        sec, verdict = system_section(spec, system, cfg)
        sections.append(sec)
        verdicts.append(verdict)
    report = {
        "format": REPORT_FORMAT,
        "config": {"depth": cfg.depth, "seed": cfg.seed, "pseudo_norm": cfg.mode, "triples": cfg.triples,
                   "holder_pairs": cfg.holder_pairs, "holder_a": cfg.holder_a},
        "systems": sections,
        "equivalence": [equivalence_section(p, systems, specs, verdicts)
                        for p in itertools.combinations(range(len(specs)), 2)],
    }
    return _jsonable(report)


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def write_report(specs: list[SystemSpec], path, cfg: ReportConfig | None = None) -> dict:
    report = run_report(specs, cfg)
    atomic_write(path, report_json(report))
    return report
