"""Complete resolution of a single equation of the family.

Solutions with |y| <= 1 come from a short case analysis.  The rest are found
by walking the unit exponents (b1, b2) through a box and testing whether
+-theta^b1 (theta - F_n)^b2 has the shape x - theta y in Z[theta].  All of
this is exact integer arithmetic; nothing numerical reaches a SolutionSet.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .sequences import ThueInstance
from .units import CubicOrder

__all__ = [
    "Solution",
    "SolutionSet",
    "brute_force_solutions",
    "solve",
    "trivial_solutions",
    "verify",
]


@dataclass(frozen=True, order=True)
class Solution:
    x: int
    y: int
    value: int

    @property
    def trivial(self) -> bool:
        return abs(self.y) <= 1


@dataclass(frozen=True)
class SolutionSet:
    """Solutions of one equation, sorted and closed under (x, y) -> (-x, -y)."""

    n: int
    solutions: tuple[Solution, ...]

    @classmethod
    def build(cls, inst: ThueInstance, pairs: Iterable[tuple[int, int]]) -> "SolutionSet":
        seen: dict[tuple[int, int], Solution] = {}
        for x, y in pairs:
            for px, py in ((x, y), (-x, -y)):
                v = verify(inst, px, py)
                if v is None:
                    raise ValueError(f"({px}, {py}) does not solve the equation for n={inst.n}")
                seen[(px, py)] = Solution(px, py, v)
        return cls(inst.n, tuple(sorted(seen.values(), key=lambda s: (s.y, s.x))))

    def pairs(self) -> set[tuple[int, int]]:
        return {(s.x, s.y) for s in self.solutions}

    def nontrivial(self) -> tuple[Solution, ...]:
        return tuple(s for s in self.solutions if not s.trivial)

    def __len__(self) -> int:
        return len(self.solutions)

    def __or__(self, other: "SolutionSet") -> "SolutionSet":
        if other.n != self.n:
            raise ValueError("cannot merge solution sets for different n")
        merged = {(s.x, s.y): s for s in self.solutions + other.solutions}
        return SolutionSet(self.n, tuple(sorted(merged.values(), key=lambda s: (s.y, s.x))))


def verify(inst: ThueInstance, x: int, y: int) -> Optional[int]:
    """The value of the form at (x, y) if it is +1 or -1, else None."""
    v = inst.form(int(x), int(y))
    return v if v in (1, -1) else None


def trivial_solutions(inst: ThueInstance) -> SolutionSet:
    """All solutions with |y| <= 1.

    y = 0 forces x^3 = +-1.  For y = 1 the product (x - F)(x - L) x equals 0
    or 2 (the value is that product minus 1), so x is 0, F, L or a divisor
    of 2.  y = -1 follows by negation.
    """
    candidates = {(1, 0)}
    for x in {0, inst.fib, inst.luc, 1, -1, 2, -2}:
        if verify(inst, x, 1) is not None:
            candidates.add((x, 1))
    return SolutionSet.build(inst, candidates)


def solve(inst: ThueInstance, b_box: int) -> SolutionSet:
    """Trivial solutions plus every solution whose unit exponents lie in [-B, B]^2.

    Exponent pairs are visited in lexicographic order of (b1, b2, sign).
    """
    if b_box < 1:
        raise ValueError("box must be at least 1")
    order = CubicOrder(inst)
    B = b_box
    thetas = {b: order.pow(order.theta, order.theta_inv, b) for b in range(-B, B + 1)}
    deltas = {b: order.pow(order.delta, order.delta_inv, b) for b in range(-B, B + 1)}
    found = []
    for b1 in range(-B, B + 1):
        t = thetas[b1]
        for b2 in range(-B, B + 1):
            c0, c1, c2 = order.mul(t, deltas[b2])
            if c2 != 0:
                continue
            for sign in (1, -1):
                x, y = sign * c0, -sign * c1
                if abs(y) >= 2 and verify(inst, x, y) is not None:
                    found.append((x, y))
    return trivial_solutions(inst) | SolutionSet.build(inst, found)


def brute_force_solutions(inst: ThueInstance, y_max: int = 1000, x_extra: int = 1000) -> SolutionSet:
    """Exhaustive search over |y| <= y_max and |x| <= L_n y_max + x_extra.

    A vectorised scan in int64 flags candidates, which are then verified in
    exact integers.  Only meant for small n, where the values fit in int64.
    """
    x_max = inst.luc * y_max + x_extra
    if 8 * (x_max + inst.luc * y_max) ** 3 >= 2**63:
        raise OverflowError("search box too large for int64 scanning")
    xs = np.arange(-x_max, x_max + 1, dtype=np.int64)
    F, L = np.int64(inst.fib), np.int64(inst.luc)
    hits = []
    for y in range(-y_max, y_max + 1):
        yy = np.int64(y)
        vals = (xs - F * yy) * (xs - L * yy) * xs - yy * yy * yy
        idx = np.nonzero((vals == 1) | (vals == -1))[0]
        hits.extend((int(xs[i]), y) for i in idx)
    return SolutionSet.build(inst, [h for h in hits if verify(inst, *h) is not None])
