"""Brute-force lattice oracles with coefficient boxes that provably suffice."""

import itertools
import math
from fractions import Fraction


def inverse(rows):
    n = len(rows)
    m = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        p = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [v / piv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [r[n:] for r in m]


def norm2(v):
    return sum(x * x for x in v)


def _box(rows, radius_sq, center=None):
    """Per-coordinate ranges for x with |x B - t| <= radius: |x_i - c_i| <= r |column i of B^-1|."""
    inv = inverse(rows)
    n = len(rows)
    c = center or [Fraction(0)] * n
    out = []
    for i in range(n):
        col = sum(inv[k][i] ** 2 for k in range(n))
        span = math.isqrt(math.ceil(radius_sq * col)) + 1
        out.append(range(math.floor(c[i]) - span, math.ceil(c[i]) + span + 1))
    return out


def combine(rows, x):
    return tuple(sum(a * r[j] for a, r in zip(x, rows)) for j in range(len(rows[0])))


def shortest(rows, max_points=2_000_000):
    bound = min(norm2(r) for r in rows)
    box = _box(rows, bound)
    if math.prod(len(r) for r in box) > max_points:
        return None
    best = bound
    for x in itertools.product(*box):
        if any(x):
            best = min(best, norm2(combine(rows, x)))
    return best


def closest(rows, target, radius_sq, exclude=lambda w: False, max_points=2_000_000):
    inv = inverse(rows)
    n = len(rows)
    center = [sum(Fraction(target[k]) * inv[k][i] for k in range(n)) for i in range(n)]
    box = _box(rows, radius_sq, center)
    if math.prod(len(r) for r in box) > max_points:
        return None
    best = None
    for x in itertools.product(*box):
        w = combine(rows, x)
        if exclude(w):
            continue
        d = norm2([a - b for a, b in zip(w, target)])
        if best is None or d < best:
            best = d
    return best
