"""The integer neighbor set Delta = (K - K) cap Z^d.

Two level-n cells K_u, K_v meet iff d_u - d_v lies in Delta, so Delta is the
exact horizontal-edge oracle of the augmented tree.  It is computed as the
greatest fixed point of t -> A t - e (e in D - D) on the integer points of
the difference body of the bounding box: a vector survives iff it starts an
infinite path, which is exactly membership in K - K.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Literal

from .affine_core import AffineSystem, IntVector, vec_sub
from .errors import CandidateOverflow

DEFAULT_CANDIDATE_CAP = 10_000_000


@dataclass(frozen=True)
class NeighborSet:
    system: AffineSystem
    vectors: frozenset[IntVector]
    mode: Literal["K", "box"] = "K"

    def __contains__(self, t) -> bool:
        return tuple(t) in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def nonzero(self) -> list[IntVector]:
        zero = (0,) * self.system.dim
        return sorted(t for t in self.vectors if t != zero)

    def successors(self, t: IntVector) -> list[IntVector]:
        at = self.system.apply(t)
        return [s for e in self.system.digit_differences if (s := vec_sub(at, e)) in self.vectors]


def candidate_range(system: AffineSystem) -> list[range]:
    """Integer ranges covering the difference body B - B, one lattice unit wider."""
    box = system.box
    return [range(math.floor(lo - hi) - 1, math.ceil(hi - lo) + 2) for lo, hi in zip(box.lo, box.hi)]


def compute(system: AffineSystem, mode: Literal["K", "box"] = "K",
            cap: int = DEFAULT_CANDIDATE_CAP) -> NeighborSet:
    ranges = candidate_range(system)
    count = math.prod(len(r) for r in ranges)
    if count > cap:
        raise CandidateOverflow(f"{count} candidates exceed the cap {cap}")
    if mode == "box":
        box = system.box
        vectors = frozenset(
            t for t in itertools.product(*ranges)
            if all(abs(x) <= h - l for x, l, h in zip(t, box.lo, box.hi))
        )
        return NeighborSet(system, vectors, "box")
    if mode != "K":
        raise ValueError(f"unknown neighbor mode {mode!r}")

    alive = set(itertools.product(*ranges))
    diffs = system.digit_differences
    succ: dict[IntVector, list[IntVector]] = {}
    pred: dict[IntVector, list[IntVector]] = {t: [] for t in alive}
    for t in alive:
        at = system.apply(t)
        out = [s for e in diffs if (s := vec_sub(at, e)) in alive]
        succ[t] = out
        for s in out:
            pred[s].append(t)
    outdeg = {t: len(v) for t, v in succ.items()}
    work = deque(t for t, k in outdeg.items() if k == 0)
    while work:
        t = work.popleft()
        if t not in alive:
            continue
        alive.discard(t)
        for p in pred[t]:
            if p in alive:
                outdeg[p] -= 1
                if outdeg[p] == 0:
                    work.append(p)
    return NeighborSet(system, frozenset(alive), "K")


def is_neighbor(ns: NeighborSet, t) -> bool:
    return tuple(t) in ns.vectors


def verify_fixed_point(ns: NeighborSet) -> bool:
    """Every vector has a successor inside the set; zero present; symmetric."""
    zero = (0,) * ns.system.dim
    if zero not in ns.vectors:
        return False
    for t in ns.vectors:
        if tuple(-x for x in t) not in ns.vectors:
            return False
        if ns.mode == "K" and not ns.successors(t):
            return False
    return True


class OracleAnswer(str, Enum):
    IN = "definitely_in"
    OUT = "definitely_out"
    UNDECIDED = "undecided"


def brute_force_oracle(system: AffineSystem, t, depth: int, margin: float = 1e-6) -> OracleAnswer:
    """Decide whether K and K + t meet by refining pairs of cell boxes.

    At depth n, a pair of level-n cells of K and of K + t is described, after
    rescaling by A^n, by the integer shift s between their boxes B + d_u and
    B + d_u + s (B = the converged hull box).  Pairs whose boxes are separated
    by more than ``margin`` times the box size are discarded.  The surviving
    shifts reachable within ``depth`` refinements form a finite graph: a cycle
    in it can be repeated forever and gives nested intersecting cells, hence a
    common point; if the exploration closes off before ``depth`` without a
    cycle, every chain of intersecting boxes dies out and the sets are disjoint.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    widths = system.box.core_widths
    tol = margin * max(max(widths), 1.0)
    diffs = sorted({vec_sub(dj, di) for di in system.digits for dj in system.digits})

    def overlaps(s):
        return all(abs(x) <= w + tol for x, w in zip(s, widths))

    start = tuple(int(x) for x in t)
    if not overlaps(start):
        return OracleAnswer.OUT
    edges: dict[IntVector, list[IntVector]] = {}
    frontier = [start]
    seen = {start}
    for _ in range(depth):
        nxt = []
        for s in frontier:
            a_s = system.apply(s)
            out = [s2 for e in diffs if overlaps(s2 := tuple(x + y for x, y in zip(a_s, e)))]
            edges[s] = out
            for s2 in out:
                if s2 not in seen:
                    seen.add(s2)
                    nxt.append(s2)
        frontier = nxt
        if not frontier:
            break
    if _has_cycle(edges):
        return OracleAnswer.IN
    if not frontier:
        return OracleAnswer.OUT
    return OracleAnswer.UNDECIDED


def _has_cycle(edges: dict) -> bool:
    """Cycle among expanded nodes (iterative three-colour DFS)."""
    colour: dict = {}
    for root in edges:
        if root in colour:
            continue
        stack = [(root, iter(edges[root]))]
        colour[root] = 1
        while stack:
            node, it = stack[-1]
            for nb in it:
                if nb not in edges:
                    continue
                c = colour.get(nb, 0)
                if c == 1:
                    return True
                if c == 0:
                    colour[nb] = 1
                    stack.append((nb, iter(edges[nb])))
                    break
            else:
                colour[node] = 2
                stack.pop()
    return False
