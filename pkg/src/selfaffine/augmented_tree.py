"""The graph (X, E) induced by (A, D): symbolic tree plus horizontal edges.

A vertex is a pair ``(level, offset)``: words of equal length with equal
offsets d_u define the same map S_u, so the offset is a complete key for the
quotient X_n.  Two vertices at the same level are joined horizontally iff
their offset difference lies in the neighbor set.

Two graph back ends share the geodesic machinery:

* :class:`TreeExpansion` materializes every level up to a depth (``expand``)
  and supports breadth-first distances, used as the ground truth;
* :class:`LazyTree` answers parent / neighbor / component queries on demand,
  which is what deep boundary sampling needs (7^10 vertices are never built).
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .affine_core import AffineSystem, IntVector, map_fixed_point, vec_add, vec_sub, word_offset
from .errors import BudgetExceeded
from .neighbor_set import NeighborSet
from .pseudo_norm import PseudoNormEvaluator

Vertex = tuple[int, IntVector]

DEFAULT_BUDGET = 2_000_000


class UnionFind:
    def __init__(self, size):
        self.parents = list(range(size))

    def find(self, a):
        root = a
        while root != self.parents[root]:
            root = self.parents[root]
        while a != root:
            self.parents[a], a = root, self.parents[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as root so component order is stable
            if rb < ra:
                ra, rb = rb, ra
            self.parents[rb] = ra


@dataclass
class LevelSlice:
    level: int
    offsets: list[IntVector]
    # indices into the previous slice; first entry is the primary parent
    parents: list[tuple[int, ...]]
    horizontal_edges: list[tuple[int, int]]
    index: dict[IntVector, int] = field(repr=False)
    adjacency: list[list[int]] = field(repr=False)

    def __len__(self):
        return len(self.offsets)

    @property
    def vertices(self) -> list[tuple[int, IntVector, int]]:
        """(id, offset, primary parent id) triples; the root's parent is -1."""
        return [(i, o, p[0] if p else -1) for i, (o, p) in enumerate(zip(self.offsets, self.parents))]


@dataclass(frozen=True)
class Component:
    level: int
    members: tuple[int, ...]
    offsets: tuple[IntVector, ...]


@dataclass(frozen=True)
class GeodesicDecomposition:
    vertical_up: tuple[Vertex, ...]
    horizontal: tuple[Vertex, ...]
    vertical_down: tuple[Vertex, ...]
    h: int
    ell: int

    @property
    def length(self) -> int:
        return len(self.vertical_up) - 1 + self.ell + len(self.vertical_down) - 1

    @property
    def gromov_product(self) -> Fraction:
        return self.h - Fraction(self.ell, 2)


class TreeGraph:
    """Geodesic machinery common to the materialized and lazy graphs."""

    system: AffineSystem
    neighbors: NeighborSet

    def parents(self, v: Vertex) -> list[IntVector]:
        raise NotImplementedError

    def horizontal_neighbors(self, v: Vertex) -> list[Vertex]:
        raise NotImplementedError

    def parent(self, v: Vertex) -> Vertex:
        level, _ = v
        return (level - 1, self.parents(v)[0])

    def ancestor(self, v: Vertex, level: int) -> Vertex:
        while v[0] > level:
            v = self.parent(v)
        return v

    def children(self, v: Vertex) -> list[Vertex]:
        level, off = v
        a_off = self.system.apply(off)
        return sorted({(level + 1, vec_add(a_off, d)) for d in self.system.digits})

    def _component_cache(self):
        if not hasattr(self, "_comp"):
            self._comp: dict[Vertex, tuple[Vertex, ...]] = {}
            self._hdist: dict[Vertex, dict[Vertex, tuple[int, Vertex | None]]] = {}
        return self._comp, self._hdist

    def component(self, v: Vertex) -> tuple[Vertex, ...]:
        comp, _ = self._component_cache()
        if v not in comp:
            seen = {v}
            queue = deque([v])
            while queue:
                u = queue.popleft()
                for w in self.horizontal_neighbors(u):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            members = tuple(sorted(seen))
            for u in members:
                comp[u] = members
        return comp[v]

    def _horizontal_bfs(self, source: Vertex) -> dict[Vertex, tuple[int, Vertex | None]]:
        _, hdist = self._component_cache()
        if source not in hdist:
            out = {source: (0, None)}
            queue = deque([source])
            while queue:
                u = queue.popleft()
                for w in sorted(self.horizontal_neighbors(u)):
                    if w not in out:
                        out[w] = (out[u][0] + 1, u)
                        queue.append(w)
            hdist[source] = out
        return hdist[source]

    def horizontal_distance(self, u: Vertex, v: Vertex) -> int | None:
        entry = self._horizontal_bfs(u).get(v)
        return None if entry is None else entry[0]

    def canonical_geodesic(self, x: Vertex, y: Vertex) -> GeodesicDecomposition:
        """Up from x, across one level, down to y, minimizing length; among
        shortest such paths the one whose horizontal part is nearest the root.

        Exact for augmented trees (distinct offsets per level, which the open
        set condition guarantees); the breadth-first distance of
        :class:`TreeExpansion` is the independent check.
        """
        ux = [x]
        while ux[-1][0] > 0:
            ux.append(self.parent(ux[-1]))
        uy = [y]
        while uy[-1][0] > 0:
            uy.append(self.parent(uy[-1]))
        ux.reverse()  # ux[k] is the level-k ancestor
        uy.reverse()
        best = None
        for k in range(min(x[0], y[0]) + 1):
            dh = self.horizontal_distance(ux[k], uy[k])
            if dh is None:
                continue
            total = x[0] + y[0] - 2 * k + dh
            if best is None or total < best[0]:
                best = (total, k, dh)
        _, k, dh = best
        bfs = self._horizontal_bfs(ux[k])
        path = [uy[k]]
        while path[-1] != ux[k]:
            path.append(bfs[path[-1]][1])
        path.reverse()
        return GeodesicDecomposition(
            vertical_up=tuple(reversed(ux[k:])),
            horizontal=tuple(path),
            vertical_down=tuple(uy[k:]),
            h=k,
            ell=dh,
        )

    def distance(self, x: Vertex, y: Vertex) -> int:
        return self.canonical_geodesic(x, y).length


class TreeExpansion(TreeGraph):
    """Levels 0..depth of the graph, fully materialized."""

    def __init__(self, system: AffineSystem, neighbors: NeighborSet, slices: list[LevelSlice]):
        self.system = system
        self.neighbors = neighbors
        self.slices = slices

    @property
    def depth(self) -> int:
        return len(self.slices) - 1

    def __iter__(self):
        return iter(self.slices)

    def __getitem__(self, n) -> LevelSlice:
        return self.slices[n]

    def vertex(self, level: int, index: int) -> Vertex:
        return (level, self.slices[level].offsets[index])

    def all_vertices(self) -> list[Vertex]:
        return [(s.level, o) for s in self.slices for o in s.offsets]

    def parents(self, v: Vertex) -> list[IntVector]:
        level, off = v
        prev = self.slices[level - 1]
        return [prev.offsets[p] for p in self.slices[level].parents[self.slices[level].index[off]]]

    def horizontal_neighbors(self, v: Vertex) -> list[Vertex]:
        level, off = v
        s = self.slices[level]
        return [(level, s.offsets[j]) for j in s.adjacency[s.index[off]]]

    def _graph_neighbors(self, v: Vertex, max_level: int) -> Iterable[Vertex]:
        level, off = v
        if level > 0:
            for p in self.parents(v):
                yield (level - 1, p)
        if level < max_level and level < self.depth:
            yield from self.children(v)
        yield from self.horizontal_neighbors(v)

    def distances_from(self, x: Vertex, max_level: int | None = None) -> dict[Vertex, int]:
        """Breadth-first distances from x over vertical and horizontal edges,
        restricted to levels <= max_level."""
        if max_level is None:
            max_level = self.depth
        dist = {x: 0}
        queue = deque([x])
        while queue:
            u = queue.popleft()
            for w in self._graph_neighbors(u, max_level):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def bfs_distance(self, x: Vertex, y: Vertex, max_level: int | None = None) -> int:
        if max_level is None:
            max_level = max(x[0], y[0])
        return self.distances_from(x, max_level)[y]

    def distance(self, x: Vertex, y: Vertex) -> int:
        return self.bfs_distance(x, y)


class LazyTree(TreeGraph):
    """The infinite graph, explored on demand."""

    def __init__(self, system: AffineSystem, neighbors: NeighborSet):
        self.system = system
        self.neighbors = neighbors
        self._is_vertex: dict[Vertex, bool] = {}
        self._parents: dict[Vertex, list[IntVector]] = {}
        self._nonzero = neighbors.nonzero()

    def parents(self, v: Vertex) -> list[IntVector]:
        if v not in self._parents:
            level, off = v
            found = []
            for d in self.system.digits:
                p = self.system.apply_inverse(vec_sub(off, d))
                if all(x.denominator == 1 for x in p):
                    p = tuple(int(x) for x in p)
                    if self.is_vertex((level - 1, p)):
                        found.append(p)
            self._parents[v] = sorted(found)
        return self._parents[v]

    def is_vertex(self, v: Vertex) -> bool:
        level, off = v
        if level == 0:
            return not any(off)
        if v not in self._is_vertex:
            self._is_vertex[v] = bool(self.parents(v))
        return self._is_vertex[v]

    def horizontal_neighbors(self, v: Vertex) -> list[Vertex]:
        level, off = v
        if level == 0:
            return []
        out = []
        for t in self._nonzero:
            w = (level, vec_add(off, t))
            if self.is_vertex(w):
                out.append(w)
        return out

    def vertex_of(self, letters: Sequence[int]) -> Vertex:
        return (len(letters), word_offset(self.system, letters))


def expand(system: AffineSystem, neighbors: NeighborSet, depth: int,
           budget: int = DEFAULT_BUDGET) -> TreeExpansion:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if system.n_digits ** depth > budget:
        raise BudgetExceeded(f"N^L = {system.n_digits}^{depth} exceeds the budget {budget}")
    nonzero = neighbors.nonzero()
    zero = (0,) * system.dim
    slices = [LevelSlice(0, [zero], [()], [], {zero: 0}, [[]])]
    for level in range(1, depth + 1):
        prev = slices[-1]
        parent_sets: dict[IntVector, set[int]] = {}
        for pi, off in enumerate(prev.offsets):
            a_off = system.apply(off)
            for d in system.digits:
                parent_sets.setdefault(vec_add(a_off, d), set()).add(pi)
        offsets = sorted(parent_sets)
        index = {o: i for i, o in enumerate(offsets)}
        adjacency: list[list[int]] = [[] for _ in offsets]
        edges = []
        for i, o in enumerate(offsets):
            for t in nonzero:
                j = index.get(vec_add(o, t))
                if j is not None:
                    adjacency[i].append(j)
                    if i < j:
                        edges.append((i, j))
        for adj in adjacency:
            adj.sort()
        parents = [tuple(sorted(parent_sets[o], key=lambda p: prev.offsets[p])) for o in offsets]
        slices.append(LevelSlice(level, offsets, parents, sorted(edges), index, adjacency))
    return TreeExpansion(system, neighbors, slices)


def components(slc: LevelSlice) -> list[Component]:
    uf = UnionFind(len(slc))
    for i, j in slc.horizontal_edges:
        uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(len(slc)):
        groups.setdefault(uf.find(i), []).append(i)
    return [Component(slc.level, tuple(g), tuple(slc.offsets[i] for i in g))
            for _, g in sorted(groups.items())]


def degree_stats(expansion: TreeExpansion) -> dict:
    """Exact vertex degrees: parents + distinct children + horizontal neighbors.

    Child counts come from the system itself, so the deepest slice is counted
    correctly even though its children are not materialized.
    """
    system = expansion.system
    per_level = []
    for s in expansion.slices:
        best = 0
        for i, off in enumerate(s.offsets):
            a_off = system.apply(off)
            n_children = len({vec_add(a_off, d) for d in system.digits})
            best = max(best, len(s.parents[i]) + n_children + len(s.adjacency[i]))
        per_level.append(best)
    return {"max_degree": max(per_level), "per_level_max": per_level}


def augmented_tree_violations(expansion: TreeExpansion) -> list[tuple[Vertex, Vertex]]:
    """Horizontal edges whose parents are neither equal nor adjacent."""
    bad = []
    for s in expansion.slices[2:]:
        prev = expansion.slices[s.level - 1]
        for i, j in s.horizontal_edges:
            pi, pj = s.parents[i][0], s.parents[j][0]
            if pi != pj and pj not in prev.adjacency[pi]:
                bad.append(((s.level, s.offsets[i]), (s.level, s.offsets[j])))
    return bad


def gromov_product(graph: TreeGraph, x: Vertex, y: Vertex, check: bool = False) -> Fraction:
    """|x ^ y| = (|x| + |y| - d(x, y)) / 2, exact.

    With ``check`` the value is compared against h - ell/2 of the canonical
    geodesic and a mismatch raises AssertionError.
    """
    value = Fraction(x[0] + y[0] - graph.distance(x, y), 2)
    if check:
        alt = graph.canonical_geodesic(x, y).gromov_product
        if alt != value:
            raise AssertionError(f"Gromov product {value} != h - l/2 = {alt} for {x}, {y}")
    return value


def visual_metric(graph: TreeGraph, a: float, x: Vertex, y: Vertex) -> float:
    if a <= 0:
        raise ValueError("a must be positive")
    if x == y:
        return 0.0
    return math.exp(-a * float(gromov_product(graph, x, y)))


def default_visual_parameter(delta_hat) -> float:
    """Largest a <= 1 with exp(3 delta a) < sqrt 2 for the measured delta."""
    return min(1.0, math.log(math.sqrt(2)) / (3 * (float(delta_hat) + 0.5)))


@dataclass(frozen=True)
class HyperbolicityReport:
    delta_hat: Fraction
    max_horizontal_geodesic: int
    # running maxima over triples whose deepest vertex is at level <= n
    per_level_delta: tuple[Fraction, ...]
    per_level_horizontal: tuple[int, ...]
    triples: int


def hyperbolicity_report(graph: TreeExpansion, sample_triples: int, seed: int) -> HyperbolicityReport:
    rng = random.Random(seed)
    verts = graph.all_vertices()
    depth = graph.depth
    level_delta = [Fraction(0)] * (depth + 1)
    level_ell = [0] * (depth + 1)
    gp_cache: dict[tuple[Vertex, Vertex], tuple[Fraction, int]] = {}

    def product(u, v):
        key = (u, v) if u <= v else (v, u)
        if key not in gp_cache:
            g = graph.canonical_geodesic(*key)
            gp_cache[key] = (g.gromov_product, g.ell)
        return gp_cache[key]

    for _ in range(sample_triples):
        x, y, z = (rng.choice(verts) for _ in range(3))
        (xy, l1), (xz, l2), (zy, l3) = product(x, y), product(x, z), product(z, y)
        top = max(x[0], y[0], z[0])
        level_delta[top] = max(level_delta[top], min(xz, zy) - xy)
        level_ell[top] = max(level_ell[top], l1, l2, l3)
    for n in range(1, depth + 1):
        level_delta[n] = max(level_delta[n], level_delta[n - 1])
        level_ell[n] = max(level_ell[n], level_ell[n - 1])
    return HyperbolicityReport(level_delta[-1], level_ell[-1], tuple(level_delta), tuple(level_ell),
                               sample_triples)


def component_diameters(graph: TreeExpansion) -> list[int]:
    """Largest horizontal distance inside a component, per level (exhaustive)."""
    out = []
    for s in graph.slices:
        best = 0
        for comp in components(s):
            for i in comp.members:
                d = graph._horizontal_bfs((s.level, s.offsets[i]))
                best = max(best, max(v[0] for v in d.values()))
        out.append(best)
    return out


def _inverse_power_norm(system: AffineSystem) -> float:
    """max_{0 <= j < k*} ||A^{-j}||_2."""
    m = np.eye(system.dim)
    best = 1.0
    for _ in range(system.contraction.k_star - 1):
        m = system.inverse_float @ m
        best = max(best, float(np.linalg.norm(m, 2)))
    return best


def boundary_point(system: AffineSystem, letters: Sequence[int], base_letter: int = 0):
    """S_u(x0) for x0 the fixed point of S_base, with an error bound for the
    distance to any boundary point whose ray passes through u.

    Returns ``(point, error_bound)``; the point is exact rational arithmetic
    rounded to floats at the end.
    """
    return vertex_point(system, len(letters), word_offset(system, letters), base_letter)


def vertex_point(system: AffineSystem, level: int, offset: IntVector, base_letter: int = 0):
    x0 = map_fixed_point(system, base_letter)
    y = tuple(a + b for a, b in zip(x0, offset))
    for _ in range(level):
        y = system.apply_inverse(y)
    point = tuple(float(c) for c in y)
    k, theta = system.contraction.k_star, system.contraction.theta
    # both S_u(x0) and the limit lie in S_u(B), B within the ball of radius sqrt(d) R_K
    bound = theta ** (level // k) * _inverse_power_norm(system) * 2 * math.sqrt(system.dim) * system.bounding_radius
    return point, bound


@dataclass(frozen=True)
class HolderScan:
    depth: int
    a: float
    alpha: float
    ratio_min: float
    ratio_max: float
    pairs: int


def holder_scan(system: AffineSystem, graph: TreeGraph, ev: PseudoNormEvaluator, a: float,
                pairs: int, seed: int, depth: int) -> HolderScan:
    """Extremes of rho_a(xi, eta)^alpha / w(phi xi - phi eta) over seeded
    pairs of distinct level-``depth`` vertices, alpha = ln q / (d a)."""
    if a <= 0:
        raise ValueError("a must be positive")
    rng = random.Random(seed)
    alpha = math.log(system.q) / (system.dim * a)
    n = system.n_digits
    samples = []
    while len(samples) < pairs:
        u = tuple(rng.randrange(n) for _ in range(depth))
        v = tuple(rng.randrange(n) for _ in range(depth))
        x, y = (depth, word_offset(system, u)), (depth, word_offset(system, v))
        if x != y:
            samples.append((x, y))
    rho = []
    diffs = []
    for x, y in samples:
        g = graph.canonical_geodesic(x, y).gromov_product
        rho.append(math.exp(-a * float(g)) ** alpha)
        px, _ = vertex_point(system, *x)
        py, _ = vertex_point(system, *y)
        diffs.append(np.subtract(px, py))
    w = ev.evaluate(np.array(diffs))
    ratios = np.array(rho) / w
    return HolderScan(depth, a, alpha, float(ratios.min()), float(ratios.max()), pairs)


def cell_cloud(system: AffineSystem, depth: int) -> np.ndarray:
    """Points S_u(x0) for all words of length ``depth``: a finite sample of K."""
    x0 = np.array([float(c) for c in map_fixed_point(system, 0)])
    pts = np.array([x0])
    digits = np.array(system.digits, dtype=float)
    ainv = system.inverse_float
    for _ in range(depth):
        pts = ((pts[:, None, :] + digits[None, :, :]) @ ainv.T).reshape(-1, system.dim)
    return np.unique(pts, axis=0)


def separation_profile(expansion: TreeExpansion, ev: PseudoNormEvaluator, cloud_depth: int = 2,
                       window: int | None = None) -> list[float]:
    """For each level n >= 1, q^{n/d} times the smallest w-distance between
    two cells of that level that share no horizontal edge.

    Cells are sampled by ``cell_cloud``; shifts are restricted to
    |t|_inf <= window (default: twice the candidate range), where the
    minimum is attained.
    """
    system = expansion.system
    cloud = cell_cloud(system, cloud_depth)
    diff_cloud = (cloud[:, None, :] - cloud[None, :, :]).reshape(-1, system.dim)
    if window is None:
        window = 2 * (int(math.ceil(max(system.box.widths))) + 1)
    cache: dict[IntVector, float] = {}
    out = []
    grid = [t for t in itertools.product(range(-window, window + 1), repeat=system.dim)
            if any(t) and t not in expansion.neighbors]
    for s in expansion.slices[1:]:
        shifts = [t for t in grid if any(vec_add(o, t) in s.index for o in s.offsets)]
        best = math.inf
        for t in shifts:
            if t not in cache:
                cache[t] = float(ev.evaluate(diff_cloud + np.array(t, dtype=float)).min())
            best = min(best, cache[t])
        out.append(best)
    return out
