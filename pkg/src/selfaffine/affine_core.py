"""Exact integer/rational linear algebra for an affine pair (A, D).

Vectors are tuples of Python ints (arbitrary precision), matrices are tuples
of rows.  Rational results use :class:`fractions.Fraction`.  Floating point
is used only where the quantity is inherently real (eigenvalue moduli,
singular values, the converged bounding box), and every such value that is
relied upon downstream is re-checked exactly.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateDigit, NoConvergence, NotExpanding, SelfAffineError, SingularMatrix

log = logging.getLogger(__name__)

IntVector = tuple[int, ...]
IntMatrix = tuple[IntVector, ...]

EXPANSION_TOL = 1e-9
BOX_TOL = 1e-9
BOX_INFLATION = 0.01
FALLBACK_ITERATIONS = 64


# ---------------------------------------------------------------------------
# exact helpers
# ---------------------------------------------------------------------------

def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def identity(d: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


def mat_pow(m: IntMatrix, k: int) -> IntMatrix:
    result = identity(len(m))
    base = m
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def vec_add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination; exact for integer input."""
    a = [list(row) for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(m: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    """Gauss-Jordan inverse over the rationals."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def characteristic_polynomial(m: IntMatrix) -> list[int]:
    """Coefficients of det(xI - m), leading coefficient first (Faddeev-LeVerrier)."""
    n = len(m)
    coeffs = [Fraction(1)]
    mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        prod = mat_mul(m, mk) if k > 1 else tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))
        mk = [[prod[i][j] + (coeffs[-1] if i == j else 0) for j in range(n)] for i in range(n)]
        amk = mat_mul(m, mk)
        coeffs.append(-sum(amk[i][i] for i in range(n)) / k)
    return [int(c) for c in coeffs]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionWitness:
    """Smallest power k* with sigma_min(A^k*) > 1, and theta = 1/sigma_min.

    Guarantees ||A^{-k*} x|| <= theta ||x|| for every x (Euclidean norm).
    """

    k_star: int
    theta: float


@dataclass(frozen=True)
class Box:
    """Axis-aligned box.  ``lo``/``hi`` is the invariant (inflated) box; the
    ``core`` bounds are the converged hull before inflation."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    core_lo: tuple[float, ...]
    core_hi: tuple[float, ...]
    # A^{-m}(B + d_u) is inside B for every word u of this length
    invariance_power: int = 1

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.lo, self.hi))

    @property
    def core_widths(self) -> tuple[float, ...]:
        return tuple(h - l for l, h in zip(self.core_lo, self.core_hi))


@dataclass(frozen=True)
class ResidueCertificate:
    distinct_residues: bool
    complete_system: bool
    # first offending pair (i, j) with d_i - d_j in A Z^d, if any
    collision: tuple[int, int] | None = None


@dataclass(frozen=True)
class AffineSystem:
    matrix: IntMatrix
    digits: tuple[IntVector, ...]
    q: int
    lambda0: float
    lambda1: float
    contraction: ContractionWitness
    box: Box = field(repr=False)
    bounding_radius: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def n_digits(self) -> int:
        return len(self.digits)

    @cached_property
    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        return inverse(self.matrix)

    @cached_property
    def inverse_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.inverse])

    @cached_property
    def matrix_float(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    @cached_property
    def digit_differences(self) -> tuple[IntVector, ...]:
        return tuple(sorted({vec_sub(a, b) for a in self.digits for b in self.digits}))

    def is_diagonal(self) -> bool:
        return all(self.matrix[i][j] == 0 for i in range(self.dim) for j in range(self.dim) if i != j)

    def apply(self, v: Sequence[int]) -> IntVector:
        return mat_vec(self.matrix, v)

    def apply_inverse(self, v: Sequence) -> tuple[Fraction, ...]:
        return mat_vec(self.inverse, [Fraction(x) for x in v])

    def in_lattice_image(self, v: Sequence[int]) -> bool:
        """True iff v in A Z^d."""
        return all(x.denominator == 1 for x in self.apply_inverse(v))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _as_matrix(matrix: Iterable[Iterable[int]]) -> IntMatrix:
    rows = tuple(tuple(int(x) for x in row) for row in matrix)
    if not rows or any(len(r) != len(rows) for r in rows):
        raise SelfAffineError("matrix must be square and nonempty")
    for row, orig in zip(rows, matrix):
        if any(int(x) != x for x in orig):
            raise SelfAffineError("matrix entries must be integers")
    return rows


def _as_digits(digits: Iterable[Iterable[int]], d: int) -> tuple[IntVector, ...]:
    out = tuple(tuple(int(x) for x in v) for v in digits)
    if not out:
        raise SelfAffineError("digit set must be nonempty")
    for v, orig in zip(out, digits):
        if len(v) != d:
            raise SelfAffineError(f"digit {list(orig)} has dimension {len(v)}, expected {d}")
        if any(int(x) != x for x in orig):
            raise SelfAffineError("digits must be integer vectors")
    seen = set()
    for v in out:
        if v in seen:
            raise DuplicateDigit(f"digit {list(v)} occurs twice")
        seen.add(v)
    return out


def eigenvalue_moduli(matrix: IntMatrix) -> np.ndarray:
    poly = characteristic_polynomial(matrix)
    return np.sort(np.abs(np.roots(np.array(poly, dtype=float))))


def contraction_witness(matrix: IntMatrix, max_power: int = 64) -> ContractionWitness:
    for k in range(1, max_power + 1):
        mk = np.array(mat_pow(matrix, k), dtype=float)
        smin = np.linalg.svd(mk, compute_uv=False)[-1]
        if smin > 1.0 + EXPANSION_TOL:
            return ContractionWitness(k, float(1.0 / smin))
    raise NotExpanding(f"no power up to {max_power} has smallest singular value > 1")


def _image_hull(minv: np.ndarray, lo: np.ndarray, hi: np.ndarray, offsets: np.ndarray):
    center = (lo + hi) / 2
    radius = (hi - lo) / 2
    r = np.abs(minv) @ radius
    c = (center[None, :] + offsets) @ minv.T
    return (c - r).min(axis=0), (c + r).max(axis=0)


def _box_is_invariant(matrix: IntMatrix, digits, lo, hi) -> bool:
    inv = inverse(matrix)
    flo = [Fraction(x) for x in lo]
    fhi = [Fraction(x) for x in hi]
    for corner in itertools.product(*zip(flo, fhi)):
        for dgt in digits:
            img = mat_vec(inv, vec_add(corner, dgt))
            if any(x < a or x > b for x, a, b in zip(img, flo, fhi)):
                return False
    return True


def _converge_box(matrix: IntMatrix, digits, max_iter: int = 100_000) -> Box:
    d = len(matrix)
    # Use the first power m with ||A^{-m}||_inf < 1 so the hull map contracts.
    # The box is invariant for the m-step maps S_u, |u| = m, which is enough
    # for K in B.  One-step invariance is impossible for some matrices, e.g.
    # [[1,-1],[1,1]] maps every square onto a diamond of the same width.
    m = 1
    while True:
        inv_m = np.array([[float(x) for x in row] for row in inverse(mat_pow(matrix, m))])
        if np.abs(inv_m).sum(axis=1).max() < 1.0:
            break
        m += 1
        if m > 64:
            raise NoConvergence("no power of A^{-1} contracts in the max-norm")
    level_offsets = [(0,) * d]
    for _ in range(m):
        level_offsets = sorted({vec_add(mat_vec(matrix, o), dg) for o in level_offsets for dg in digits})
    offs_m = np.array(level_offsets, dtype=float)
    lo = np.zeros(d)
    hi = np.zeros(d)
    for _ in range(max_iter):
        nlo, nhi = _image_hull(inv_m, lo, hi, offs_m)
        done = max(np.abs(nlo - lo).max(), np.abs(nhi - hi).max()) < BOX_TOL
        lo, hi = nlo, nhi
        if done:
            break
    else:
        raise NoConvergence("bounding box iteration did not converge")
    core_lo, core_hi = tuple(lo.tolist()), tuple(hi.tolist())
    width = hi - lo
    scale = max(float(width.max()), 1.0)
    factor = BOX_INFLATION
    for _ in range(20):
        pad = np.where(width > 0, factor * width, factor * scale)
        blo, bhi = lo - pad, hi + pad
        if _box_is_invariant(mat_pow(matrix, m), level_offsets, blo.tolist(), bhi.tolist()):
            return Box(tuple(blo.tolist()), tuple(bhi.tolist()), core_lo, core_hi, m)
        factor *= 2
    raise NoConvergence("inflated bounding box failed the exact invariance check")


def validate_system(matrix, digits) -> AffineSystem:
    """Check (A, D) and populate the derived constants."""
    mat = _as_matrix(matrix)
    d = len(mat)
    det = determinant(mat)
    if det == 0:
        raise SingularMatrix("det A = 0")
    digs = _as_digits(digits, d)
    moduli = eigenvalue_moduli(mat)
    if moduli[0] <= 1.0 + EXPANSION_TOL:
        raise NotExpanding(f"eigenvalue modulus {moduli[0]:.12g} is not > 1")
    witness = contraction_witness(mat)
    box = _converge_box(mat, digs)
    radius = max(max(abs(x) for x in box.lo), max(abs(x) for x in box.hi))
    return AffineSystem(
        matrix=mat,
        digits=digs,
        q=abs(det),
        lambda0=float(moduli[0]),
        lambda1=float(moduli[-1]),
        contraction=witness,
        box=box,
        bounding_radius=float(radius),
    )


def word_offset(system: AffineSystem, letters: Iterable[int]) -> IntVector:
    """d_u for u = i_1...i_n: Horner evaluation d_{i_n} + A d_{i_{n-1}} + ...

    Letters are 0-based indices into ``system.digits``.
    """
    off = (0,) * system.dim
    for i in letters:
        off = vec_add(system.apply(off), system.digits[i])
    return off


def residue_check(system: AffineSystem) -> ResidueCertificate:
    digits = system.digits
    for i, j in itertools.combinations(range(len(digits)), 2):
        if system.in_lattice_image(vec_sub(digits[i], digits[j])):
            return ResidueCertificate(False, False, (i, j))
    return ResidueCertificate(True, len(digits) == system.q)


def map_fixed_point(system: AffineSystem, letter: int) -> tuple[Fraction, ...]:
    """Fixed point of S_letter(x) = A^{-1}(x + d_letter), i.e. (A - I)^{-1} d."""
    d = system.dim
    shifted = tuple(tuple(system.matrix[i][j] - (i == j) for j in range(d)) for i in range(d))
    digit = system.digits[letter]
    if determinant(shifted) != 0:
        return mat_vec(inverse(shifted), [Fraction(x) for x in digit])
    log.warning("det(A - I) = 0; approximating fixed point by %d iterations", FALLBACK_ITERATIONS)
    x = (Fraction(0),) * d
    for _ in range(FALLBACK_ITERATIONS):
        x = system.apply_inverse(vec_add(x, digit))
    return x


def bounding_box(system: AffineSystem) -> Box:
    return system.box


def offsets_at_level(system: AffineSystem, n: int) -> list[IntVector]:
    """Distinct offsets d_u over all words of length n, sorted."""
    level = [(0,) * system.dim]
    for _ in range(n):
        level = sorted({vec_add(system.apply(o), dg) for o in level for dg in system.digits})
    return level
