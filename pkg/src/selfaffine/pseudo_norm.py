"""The A-homogeneous pseudo-norm w(x) = sum_n q^{-n/d} h(A^n x) and derived set
metrics.

Two choices of the bump h are offered.  ``sharp`` takes h to be the indicator
of the annulus V = {y : |A^{-1} y| < 1 <= |y|}; ``mollified`` convolves that
indicator with a normalized polynomial bump of radius ``delta`` using a
midpoint grid.  Both give a symmetric, A-homogeneous, positive gauge.

The series is truncated using the contraction witness (k*, theta): once k*
consecutive indices all land outside the support annulus on the same side,
every further index does too, so the truncation is exact rather than
heuristic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .affine_core import AffineSystem

MAX_STEPS = 100_000


@dataclass(frozen=True)
class PseudoNormEvaluator:
    system: AffineSystem
    mode: Literal["sharp", "mollified"] = "sharp"
    delta: float = 0.25
    quadrature_points: int = 8
    _nodes: np.ndarray = field(init=False, repr=False, compare=False)
    _weights: np.ndarray = field(init=False, repr=False, compare=False)
    _center_weight: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in ("sharp", "mollified"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "mollified":
            if not 0 < self.delta < 0.5:
                raise ValueError("delta must lie in (0, 1/2)")
            nodes, weights, center = _bump_quadrature(self.system.dim, self.delta, self.quadrature_points)
        else:
            nodes, weights, center = np.zeros((0, self.system.dim)), np.zeros(0), 1.0
        object.__setattr__(self, "_nodes", nodes)
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(self, "_center_weight", center)

    @property
    def inner_radius(self) -> float:
        return 1.0

    @property
    def outer_radius(self) -> float:
        return float(np.linalg.norm(self.system.matrix_float, 2))

    @property
    def support(self) -> tuple[float, float]:
        """Annulus outside of which h vanishes."""
        if self.mode == "sharp":
            return self.inner_radius, self.outer_radius
        return self.inner_radius * (1 - self.delta), self.outer_radius * (1 + self.delta)

    def __call__(self, x) -> float:
        return float(self.evaluate(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def h(self, y: np.ndarray) -> np.ndarray:
        """The bump h on an (m, d) array.

        Nodes come in pairs +-z summed together, so h(-y) = h(y) holds
        bit-for-bit, not only up to rounding.
        """
        out = self._center_weight * self._in_v(y)
        if len(self._weights):
            plus = self._in_v(y[:, None, :] + self._nodes[None, :, :])
            minus = self._in_v(y[:, None, :] - self._nodes[None, :, :])
            out = out + (plus + minus) @ self._weights
        return out

    def _in_v(self, pts: np.ndarray) -> np.ndarray:
        ainv = self.system.inverse_float
        inside = (np.linalg.norm(pts @ ainv.T, axis=-1) < 1.0) & (np.linalg.norm(pts, axis=-1) >= 1.0)
        return inside.astype(float)

    def evaluate(self, points) -> np.ndarray:
        """w at each row of an (m, d) array."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        m = x.shape[0]
        out = np.zeros(m)
        active = np.linalg.norm(x, axis=1) > 0
        if not active.any():
            return out
        a = self.system.matrix_float
        ainv = self.system.inverse_float
        q_scale = self.system.q ** (1.0 / self.system.dim)
        lo, hi = self.support
        k = self.system.contraction.k_star
        x = x[active]
        acc = np.zeros(x.shape[0])

        # n = 0, 1, 2, ...: stop once k* consecutive norms exceed the support
        y = x.copy()
        run = np.zeros(x.shape[0], dtype=int)
        n = 0
        while True:
            acc += self.h(y) * q_scale ** (-n)
            r = np.linalg.norm(y, axis=1)
            run = np.where(r > hi, run + 1, 0)
            if (run >= k).all():
                break
            n += 1
            if n > MAX_STEPS:
                raise RuntimeError("pseudo-norm truncation did not terminate")
            y = y @ a.T

        # n = -1, -2, ...: stop once k* consecutive norms fall below the support
        y = x @ ainv.T
        run = np.zeros(x.shape[0], dtype=int)
        n = -1
        while True:
            acc += self.h(y) * q_scale ** (-n)
            r = np.linalg.norm(y, axis=1)
            run = np.where(r < lo, run + 1, 0)
            if (run >= k).all():
                break
            n -= 1
            if -n > MAX_STEPS:
                raise RuntimeError("pseudo-norm truncation did not terminate")
            y = y @ ainv.T
        out[active] = acc
        return out


def _bump_quadrature(d: int, delta: float, points: int):
    """Midpoint grid on [-delta, delta]^d restricted to the ball, weighted by
    the bump (1 - |z|^2/delta^2)^2 and normalized to unit mass.

    Returns one node of each +-pair, the weight of each member of the pair,
    and the weight of the centre node (zero for an even grid).
    """
    ticks = (np.arange(points) + 0.5) / points * 2 * delta - delta
    grid = np.stack(np.meshgrid(*([ticks] * d), indexing="ij"), axis=-1).reshape(-1, d)
    r2 = (grid ** 2).sum(axis=1) / delta ** 2
    keep = r2 < 1
    nodes = grid[keep]
    weights = (1 - r2[keep]) ** 2
    weights = weights / weights.sum()
    # the grid is symmetric: keep the lexicographically positive half
    nonzero = np.abs(nodes) > 1e-15
    first = np.argmax(nonzero, axis=1)
    lead = nodes[np.arange(len(nodes)), first]
    is_center = ~nonzero.any(axis=1)
    half = (~is_center) & (lead > 0)
    center = float(weights[is_center].sum())
    return nodes[half], weights[half], center


def _pairwise_differences(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return (p[:, None, :] - q[None, :, :]).reshape(-1, p.shape[1])


def diam_w(ev: PseudoNormEvaluator, points) -> float:
    p = np.atleast_2d(np.asarray(points, dtype=float))
    if p.shape[0] == 0:
        raise ValueError("diam_w of an empty set")
    return float(ev.evaluate(_pairwise_differences(p, p)).max())


def dist_w(ev: PseudoNormEvaluator, first, second) -> float:
    p = np.atleast_2d(np.asarray(first, dtype=float))
    q = np.atleast_2d(np.asarray(second, dtype=float))
    if p.shape[0] == 0 or q.shape[0] == 0:
        raise ValueError("dist_w needs nonempty sets")
    return float(ev.evaluate(_pairwise_differences(p, q)).min())


def beta_estimate(ev: PseudoNormEvaluator, samples: int, seed: int, radius: float = 10.0) -> float:
    """Empirical lower bound for the quasi-triangle constant: the largest
    observed w(x+y) / max(w(x), w(y)) over seeded pairs in [-radius, radius]^d.
    The pair (x, 0) always gives 1, so the result is at least 1."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    d = ev.system.dim
    x = rng.uniform(-radius, radius, size=(samples, d))
    y = rng.uniform(-radius, radius, size=(samples, d))
    wx, wy, wxy = ev.evaluate(x), ev.evaluate(y), ev.evaluate(x + y)
    denom = np.maximum(wx, wy)
    ok = denom > 0
    return float(max(1.0, (wxy[ok] / denom[ok]).max(initial=1.0)))


def comparison_exponents(system: AffineSystem, eps: float | None = None) -> tuple[float, float]:
    """(low, high) exponents ln q / (d ln(lambda0 - eps)) and ln q / (d ln(lambda1 + eps))."""
    if eps is None:
        eps = (system.lambda0 - 1) / 2
    c = math.log(system.q) / system.dim
    return c / math.log(system.lambda0 - eps), c / math.log(system.lambda1 + eps)


def norm_comparison(ev: PseudoNormEvaluator, samples: int, seed: int) -> dict:
    """Empirical constants for |x|^e_low / C <= w(x) <= C |x|^e_high on |x| <= 1.

    Returns ``sup_ratio_low`` = max |x|^e_low / w(x) and ``sup_ratio_high`` =
    max w(x) / |x|^e_high; both stay bounded as the sample grows.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    d = ev.system.dim
    direction = rng.normal(size=(samples, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    # log-uniform radii in [1e-6, 1] so small scales are exercised
    radius = 10 ** rng.uniform(-6, 0, size=samples)
    x = direction * radius[:, None]
    w = ev.evaluate(x)
    e_low, e_high = comparison_exponents(ev.system)
    r = np.linalg.norm(x, axis=1)
    return {
        "exponent_low": e_low,
        "exponent_high": e_high,
        "sup_ratio_low": float((r ** e_low / w).max()),
        "sup_ratio_high": float((w / r ** e_high).max()),
    }


def ratio_sequence(ev: PseudoNormEvaluator, x0, steps: int, exponent: float) -> list[float]:
    """w(A^{-k} x0) / |A^{-k} x0|^exponent for k = 0..steps-1."""
    x = np.asarray(x0, dtype=float)
    pts = []
    for _ in range(steps):
        pts.append(x)
        x = ev.system.inverse_float @ x
    pts = np.array(pts)
    return (ev.evaluate(pts) / np.linalg.norm(pts, axis=1) ** exponent).tolist()
