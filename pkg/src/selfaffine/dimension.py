"""Dimension formulas: w-Hausdorff dimension, McMullen-Bedford dimension, and
the bracket relating w-dimension to Euclidean Hausdorff dimension."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .affine_core import AffineSystem
from .errors import DigitOutOfFundamentalDomain, NotDiagonal2x2, OscNotCertified
from .simplicity import osc_certified


def w_dimension(system: AffineSystem, assert_osc: bool = False) -> float:
    """d ln N / ln q, valid under the open set condition."""
    if not osc_certified(system, assert_osc):
        raise OscNotCertified("w-dimension formula needs the open set condition")
    return system.dim * math.log(system.n_digits) / math.log(system.q)


def mcmullen_groups(system: AffineSystem) -> tuple[int, int, list[int], bool]:
    """(m, n, group counts, swapped) for A = diag(m, n) with m <= n after an
    optional coordinate swap; digits are grouped by the coordinate expanded
    by m."""
    mat = system.matrix
    if system.dim != 2 or mat[0][1] != 0 or mat[1][0] != 0:
        raise NotDiagonal2x2("McMullen-Bedford formula needs a diagonal 2x2 matrix")
    a, b = mat[0][0], mat[1][1]
    if a < 2 or b < 2:
        raise NotDiagonal2x2("diagonal entries must be integers >= 2")
    for x, y in system.digits:
        if not (0 <= x < a and 0 <= y < b):
            raise DigitOutOfFundamentalDomain(f"digit ({x}, {y}) not in [0,{a})x[0,{b})")
    swapped = a > b
    axis = 1 if swapped else 0
    m, n = (b, a) if swapped else (a, b)
    counts = Counter(dg[axis] for dg in system.digits)
    return m, n, [counts[k] for k in sorted(counts)], swapped


def mcmullen_dimension(system: AffineSystem) -> float:
    """log_m( sum_j t_j^(log_n m) )."""
    m, n, groups, _ = mcmullen_groups(system)
    expo = math.log(m) / math.log(n)
    return math.log(sum(t ** expo for t in groups)) / math.log(m)


def dimension_bounds(system: AffineSystem, w_dim: float) -> tuple[float, float]:
    if w_dim < 0:
        raise ValueError("w_dim must be nonnegative")
    c = math.log(system.q) / system.dim
    return c / math.log(system.lambda1) * w_dim, c / math.log(system.lambda0) * w_dim


@dataclass
class DimensionReport:
    w_dim: float
    hausdorff_dim: float | None
    bounds: tuple[float, float]
    assumptions: list[str] = field(default_factory=list)


def dimension_report(system: AffineSystem, assert_osc: bool = False) -> DimensionReport:
    w = w_dimension(system, assert_osc)
    assumptions = ["open set condition: " + ("asserted" if assert_osc and not osc_certified(system)
                                             else "certified by distinct residues")]
    haus = None
    try:
        m, n, groups, swapped = mcmullen_groups(system)
        haus = mcmullen_dimension(system)
        assumptions.append(f"diagonal 2x2, m={m}, n={n}, column counts {groups}"
                           + (" (coordinates swapped)" if swapped else ""))
    except (NotDiagonal2x2, DigitOutOfFundamentalDomain):
        pass
    return DimensionReport(w, haus, dimension_bounds(system, w), assumptions)
