"""Decide simplicity of the augmented tree by closing the set of component types.

A component type is the offset set of a horizontal component, translated so
that its lexicographically smallest offset is zero.  The offspring of a
component depend only on its relative offsets, so the types reachable from
the root form a transition system; when it closes up, the graph has finitely
many classes of components (simple) and, under the open set condition, the
attractor is totally disconnected.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

from .affine_core import AffineSystem, IntVector, residue_check, vec_add, vec_sub
from .augmented_tree import UnionFind
from .errors import OscNotCertified
from .neighbor_set import NeighborSet

log = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ComponentType:
    offsets: tuple[IntVector, ...]

    def __len__(self):
        return len(self.offsets)


def normalize(offsets) -> ComponentType:
    pts = sorted(set(tuple(o) for o in offsets))
    base = pts[0]
    return ComponentType(tuple(vec_sub(p, base) for p in pts))


def split_components(neighbors: NeighborSet, offsets: list[IntVector]) -> list[list[IntVector]]:
    """Partition offsets into classes connected by neighbor-set differences."""
    index = {o: i for i, o in enumerate(offsets)}
    uf = UnionFind(len(offsets))
    for i, o in enumerate(offsets):
        for t in neighbors.nonzero():
            j = index.get(vec_add(o, t))
            if j is not None:
                uf.union(i, j)
    groups: dict[int, list[IntVector]] = {}
    for i, o in enumerate(offsets):
        groups.setdefault(uf.find(i), []).append(o)
    return list(groups.values())


def children(system: AffineSystem, neighbors: NeighborSet, t: ComponentType) -> list[ComponentType]:
    """Child types of a component of type t, as a sorted multiset."""
    offspring = sorted({vec_add(system.apply(s), d) for s in t.offsets for d in system.digits})
    return sorted(normalize(g) for g in split_components(neighbors, offspring))


def is_connected(neighbors: NeighborSet, t: ComponentType) -> bool:
    return len(split_components(neighbors, list(t.offsets))) == 1


class Status(str, Enum):
    SIMPLE = "Simple"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Limits:
    max_types: int = 100_000
    max_cardinality: int = 1_000
    max_rounds: int = 64


@dataclass
class SimplicityVerdict:
    status: Status
    types: list[ComponentType]
    transitions: dict[ComponentType, list[ComponentType]]
    # largest type cardinality among the types first reached in each round
    max_cardinality_per_round: list[int]
    rounds: int
    reason: str = ""
    conclusions: list[str] = field(default_factory=list)

    @property
    def simple(self) -> bool:
        return self.status is Status.SIMPLE


def osc_certified(system: AffineSystem, assert_osc: bool = False) -> bool:
    return assert_osc or residue_check(system).distinct_residues


def decide(system: AffineSystem, neighbors: NeighborSet, limits: Limits | None = None,
           assert_osc: bool = False) -> SimplicityVerdict:
    """Breadth-first closure of component types from the root type {0}."""
    if not osc_certified(system, assert_osc):
        raise OscNotCertified("digits are not distinct modulo A Z^d and no OSC assertion was given")
    limits = limits or Limits()
    root = ComponentType(((0,) * system.dim,))
    types = [root]
    seen = {root}
    transitions: dict[ComponentType, list[ComponentType]] = {}
    per_round = [1]
    frontier = [root]
    rounds = 0
    status, reason = Status.SIMPLE, ""
    while frontier:
        if rounds >= limits.max_rounds:
            status, reason = Status.INCONCLUSIVE, f"round limit {limits.max_rounds} reached"
            break
        rounds += 1
        new = []
        for t in frontier:
            kids = children(system, neighbors, t)
            transitions[t] = kids
            for k in kids:
                if k not in seen:
                    seen.add(k)
                    types.append(k)
                    new.append(k)
        per_round.append(max((len(k) for k in new), default=0))
        if new and max(len(k) for k in new) > limits.max_cardinality:
            status, reason = Status.INCONCLUSIVE, f"type cardinality exceeded {limits.max_cardinality}"
            break
        if len(types) > limits.max_types:
            status, reason = Status.INCONCLUSIVE, f"type count exceeded {limits.max_types}"
            break
        frontier = new
    if status is Status.SIMPLE:
        per_round.pop()  # the closing round discovers nothing
    verdict = SimplicityVerdict(status, types, transitions, per_round, rounds, reason)
    if verdict.simple:
        verdict.conclusions = [
            "K is totally disconnected (total disconnectedness iff simple augmented tree)",
            f"the hyperbolic boundary is bi-Lipschitz to that of the {system.n_digits}-ary tree, "
            f"a {system.n_digits}-Cantor set",
        ]
    log.debug("simplicity: %s after %d rounds, %d types", status.value, rounds, len(types))
    return verdict


def verify_verdict(system: AffineSystem, neighbors: NeighborSet, verdict: SimplicityVerdict) -> bool:
    """Re-check a Simple certificate: root present, every type normalized and
    connected, transitions recomputed and closed, cardinality conserved."""
    if not verdict.simple:
        return False
    root = ComponentType(((0,) * system.dim,))
    known = set(verdict.types)
    if root not in known or set(verdict.transitions) != known:
        return False
    for t in verdict.types:
        if normalize(t.offsets) != t or not is_connected(neighbors, t):
            return False
        kids = children(system, neighbors, t)
        if kids != sorted(verdict.transitions[t]) or any(k not in known for k in kids):
            return False
        if sum(len(k) for k in kids) != system.n_digits * len(t):
            return False
    return True


def literal_equivalent(system: AffineSystem, level_a: int, offsets_a, level_b: int, offsets_b) -> bool:
    """Debug check of the stricter class relation: component B (at level m)
    arises from component A by x -> A^{n-m} x + d with d integral, i.e.
    offsets(B) = offsets(A) + A^m d for one integer vector d."""
    a = sorted(tuple(o) for o in offsets_a)
    b = sorted(tuple(o) for o in offsets_b)
    if len(a) != len(b) or normalize(a) != normalize(b):
        return False
    shift = vec_sub(b[0], a[0])
    v = shift
    for _ in range(level_b):
        p = system.apply_inverse(v)
        if any(x.denominator != 1 for x in p):
            return False
        v = tuple(int(x) for x in p)
    return True


def type_multiset(types) -> Counter:
    return Counter(types)
