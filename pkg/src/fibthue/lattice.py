"""Exact lattice reduction and enumeration for small integer lattices.

Everything here is exact: LLL runs on integer Gram determinants, the
reducedness check uses rational Gram-Schmidt, and the shortest/closest vector
searches enumerate with exact rational bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

__all__ = [
    "IntLattice",
    "closest_vector",
    "det",
    "gram_schmidt",
    "is_lll_reduced",
    "lll",
    "shortest_vector",
]

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntLattice:
    """A full-rank integer lattice given by a row basis."""

    rows: tuple[Vector, ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        d = len(rows)
        if d == 0 or any(len(r) != d for r in rows):
            raise ValueError("basis must be a nonempty square matrix")
        if det(rows) == 0:
            raise ValueError("basis rows are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.rows)

    def columns(self) -> tuple[Vector, ...]:
        return tuple(zip(*self.rows))

    def combine(self, coeffs: Sequence[int]) -> Vector:
        return tuple(sum(c * r[i] for c, r in zip(coeffs, self.rows)) for i in range(self.dim))


def _dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def det(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free Gaussian elimination (Bareiss)."""
    m = [list(r) for r in rows]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def gram_schmidt(rows: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Return (mu, B) with B[i] = |b_i*|^2, computed in exact rationals."""
    d = len(rows)
    star: list[list[Fraction]] = []
    mu = [[Fraction(0)] * d for _ in range(d)]
    B: list[Fraction] = []
    for i in range(d):
        v = [Fraction(x) for x in rows[i]]
        for j in range(i):
            mu[i][j] = _dot(rows[i], star[j]) / B[j]
            v = [a - mu[i][j] * b for a, b in zip(v, star[j])]
        star.append(v)
        B.append(_dot(v, v))
    return mu, B


def _nearest(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0), halves rounded up."""
    return (2 * num + den) // (2 * den)


def lll(basis: IntLattice | Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> IntLattice:
    """LLL-reduce a row basis with exact integer arithmetic.

    This is the integral variant: the Gram-Schmidt data is carried as the
    integers d_i (leading Gram minors) and lambda_ij = d_j mu_ij, so no
    rational numbers are formed.
    """
    lat = basis if isinstance(basis, IntLattice) else IntLattice(tuple(map(tuple, basis)))
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    dp, dq = delta.numerator, delta.denominator
    b = [list(r) for r in lat.rows]
    n = len(b)
    if n == 1:
        return lat
    d = [0] * (n + 1)  # d[i + 1] is the i-th Gram minor; d[0] = 1
    d[0] = 1
    lam = [[0] * n for _ in range(n)]
    d[1] = _dot(b[0], b[0])
    k, kmax = 1, 0

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = _nearest(lam[k][l], d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        big = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (big * t + lm * lam[i][k]) // d[k + 1]
        d[k] = big

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = _dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
        red(k, k - 1)
        if dq * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < dp * d[k] ** 2:
            swap(k)
            k = max(1, k - 1)
            continue
        for l in range(k - 2, -1, -1):
            red(k, l)
        k += 1
    return IntLattice(tuple(tuple(r) for r in b))


def is_lll_reduced(basis: IntLattice | Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> bool:
    """Check size reduction and the Lovasz condition in exact rationals."""
    rows = basis.rows if isinstance(basis, IntLattice) else basis
    mu, B = gram_schmidt(rows)
    n = len(rows)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, n):
        if B[k] < (Fraction(delta) - mu[k][k - 1] ** 2) * B[k - 1]:
            return False
    return True


def _int_range(center: Fraction, radius_sq: Fraction) -> range:
    """All integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    s = math.isqrt(math.floor(radius_sq))
    lo = math.floor(center) - s - 1
    hi = math.ceil(center) + s + 1
    while (lo - center) ** 2 > radius_sq and lo <= hi:
        lo += 1
    while (hi - center) ** 2 > radius_sq and hi >= lo:
        hi -= 1
    return range(lo, hi + 1)


def _enumerate(mu, B, targets, bound: Fraction, skip_zero: bool):
    """Yield (coeffs, dist^2) of all points with sum B_i (x_i - c_i)^2 <= bound.

    ``targets`` are the coordinates of the target point in the Gram-Schmidt
    frame (all zero for the shortest vector problem).
    """
    n = len(B)
    x = [0] * n

    def rec(i: int, partial: Fraction):
        center = targets[i] - sum(mu[j][i] * x[j] for j in range(i + 1, n))
        for xi in _int_range(center, (bound - partial) / B[i]):
            x[i] = xi
            p = partial + B[i] * (xi - center) ** 2
            if i == 0:
                if skip_zero and not any(x):
                    continue
                yield tuple(x), p
            else:
                yield from rec(i - 1, p)
        x[i] = 0

    yield from rec(n - 1, Fraction(0))


def shortest_vector(basis: IntLattice) -> tuple[Vector, int]:
    """An exact shortest nonzero vector and its squared length."""
    red = lll(basis)
    rows = red.rows
    mu, B = gram_schmidt(rows)
    best = rows[0]
    best_sq = _dot(best, best)
    bound = Fraction(best_sq)
    for coeffs, _ in _enumerate(mu, B, [Fraction(0)] * len(B), bound, skip_zero=True):
        v = red.combine(coeffs)
        sq = _dot(v, v)
        if sq < best_sq or (sq == best_sq and v < best):
            best, best_sq = v, sq
    return best, best_sq


def closest_vector(
    basis: IntLattice,
    target: Sequence[int],
    exclude: Optional[Callable[[Vector], bool]] = None,
) -> tuple[Vector, int]:
    """An exact closest lattice vector to an integer target, and the squared distance.

    Vectors for which ``exclude(v)`` is true are skipped; the search radius
    grows until a vector that is not excluded turns up.  Ties go to the
    lexicographically smallest vector.
    """
    red = lll(basis)
    rows = red.rows
    mu, B = gram_schmidt(rows)
    n = len(rows)
    # coordinates of the target along the Gram-Schmidt directions
    _, star = _gs_vectors(rows)
    tau = [_dot(target, star[i]) / B[i] for i in range(n)]
    # Babai's nearest plane gives the starting radius
    x = [0] * n
    for i in range(n - 1, -1, -1):
        c = tau[i] - sum(mu[j][i] * x[j] for j in range(i + 1, n))
        x[i] = _nearest(c.numerator, c.denominator)
    v = red.combine(x)
    bound = Fraction(max(1, sum((a - t) ** 2 for a, t in zip(v, target))))
    while True:
        best, best_sq = None, None
        for coeffs, _ in _enumerate(mu, B, tau, bound, skip_zero=False):
            w = red.combine(coeffs)
            if exclude is not None and exclude(w):
                continue
            sq = sum((a - t) ** 2 for a, t in zip(w, target))
            if best is None or sq < best_sq or (sq == best_sq and w < best):
                best, best_sq = w, sq
        if best is not None:
            return best, best_sq
        bound *= 4


def _gs_vectors(rows):
    star = []
    B = []
    for i in range(len(rows)):
        v = [Fraction(a) for a in rows[i]]
        for j in range(i):
            m = _dot(rows[i], star[j]) / B[j]
            v = [a - m * b for a, b in zip(v, star[j])]
        star.append(v)
        B.append(_dot(v, v))
    return B, star
