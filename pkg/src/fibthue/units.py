"""Units alpha^(i) and alpha^(i) - F_n, their log matrix, and recovery of (x, y).

Two views of the same units live here.  :class:`UnitSystem` holds ball
enclosures of the three real embeddings, which the reduction needs.
:class:`CubicOrder` does exact arithmetic in Z[theta] with
f_n(theta) = 0, which lets the solver turn an exponent pair into a
candidate (x, y) with no rounding at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .realball import Ball, BallDomainError, InconclusiveError, ball_max, constants
from .roots import RootTriple, working_prec
from .sequences import ThueInstance

__all__ = [
    "CubicOrder",
    "ExponentPair",
    "SingularSystemError",
    "UnitSystem",
    "build_units",
    "recover_xy",
    "solve_b_real",
]


class SingularSystemError(ArithmeticError):
    """The 2x2 log matrix could not be certified invertible."""


@dataclass(frozen=True)
class ExponentPair:
    b1: int
    b2: int


@dataclass(frozen=True)
class UnitSystem:
    n: int
    eps: tuple[Ball, Ball, Ball]
    delta: tuple[Ball, Ball, Ball]
    log_eps: tuple[Ball, Ball, Ball]
    log_delta: tuple[Ball, Ball, Ball]
    reg_matrix: tuple[tuple[Ball, Ball], tuple[Ball, Ball]]
    reg: Ball
    prec: int

    def matrix(self, k: int, l: int) -> tuple[tuple[Ball, Ball], tuple[Ball, Ball]]:
        """Rows (log|eps_k|, log|delta_k|) and (log|eps_l|, log|delta_l|), 1-based."""
        return (
            (self.log_eps[k - 1], self.log_delta[k - 1]),
            (self.log_eps[l - 1], self.log_delta[l - 1]),
        )

    def det(self, k: int, l: int) -> Ball:
        (a, b), (c, d) = self.matrix(k, l)
        return a * d - b * c

    def inverse_norm(self, k: int, l: int) -> Ball:
        """Infinity norm of the inverse of :meth:`matrix`."""
        (a, b), (c, d) = self.matrix(k, l)
        det = abs(self.det(k, l))
        if det.lo <= 0:
            raise SingularSystemError(f"log matrix ({k},{l}) not certified invertible")
        return ball_max(abs(d) + abs(b), abs(c) + abs(a)) / det

    def regulator_window(self) -> bool:
        """Certify 2 (log alpha)^2 n^2 <= reg <= 2 n^2."""
        la = constants(self.prec).log_alpha
        n2 = self.n * self.n
        return (2 * la * la * n2 <= self.reg) and (self.reg <= 2 * n2)


def build_units(inst: ThueInstance, roots: RootTriple) -> UnitSystem:
    if inst.n < 10:
        raise ValueError("the unit system bounds are only used for n >= 10")
    prec = max(roots.prec, working_prec(inst.n))
    f = Ball(inst.fib, 0, prec)
    eps = tuple(r for r in roots)
    delta = tuple(r - f for r in roots)
    for i in range(3):
        # each root satisfies (a - F)(a - L) a = 1 within radii
        if 1 not in eps[i] * delta[i] * (eps[i] - inst.luc):
            raise InconclusiveError(f"root {i + 1} fails the unit identity")
    try:
        log_eps = tuple(abs(e).log() for e in eps)
        log_delta = tuple(abs(d).log() for d in delta)
    except BallDomainError as exc:
        raise InconclusiveError(str(exc)) from exc
    m = ((log_eps[0], log_delta[0]), (log_eps[1], log_delta[1]))
    reg = abs(m[0][0] * m[1][1] - m[0][1] * m[1][0])
    return UnitSystem(
        n=inst.n,
        eps=eps,
        delta=delta,
        log_eps=log_eps,
        log_delta=log_delta,
        reg_matrix=m,
        reg=reg,
        prec=prec,
    )


def solve_b_real(us: UnitSystem, k: int, l: int, log_beta_k: Ball, log_beta_l: Ball) -> tuple[Ball, Ball]:
    """Solve log|beta_i| = b1 log|eps_i| + b2 log|delta_i| for i = k, l."""
    if k == l:
        raise ValueError("k and l must differ")
    (a, b), (c, d) = us.matrix(k, l)
    det = a * d - b * c
    if det.contains_zero():
        raise SingularSystemError(f"log matrix ({k},{l}) has a determinant ball containing 0")
    b1 = (d * log_beta_k - b * log_beta_l) / det
    b2 = (a * log_beta_l - c * log_beta_k) / det
    return b1, b2


def recover_xy(
    inst: ThueInstance, roots: RootTriple, e: ExponentPair, sign: int
) -> Optional[tuple[int, int]]:
    """Numerically rebuild (x, y) from beta_i = sign eps_i^b1 delta_i^b2, i = 1, 2.

    Returns the pair only when it solves the equation exactly.  Raises
    ``InconclusiveError`` when the balls are too wide to round.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    f = inst.fib
    r1, r2 = roots.r1, roots.r2
    beta1 = sign * (r1 ** e.b1) * ((r1 - f) ** e.b2)
    beta2 = sign * (r2 ** e.b1) * ((r2 - f) ** e.b2)
    y_ball = (beta1 - beta2) / (r2 - r1)
    x_ball = beta1 + r1 * y_ball
    if x_ball.rad > 0.25 or y_ball.rad > 0.25:
        raise InconclusiveError("recovered x, y are not sharp enough to round")
    x, y = x_ball.nearest_int(), y_ball.nearest_int()
    if inst.form(x, y) in (1, -1):
        return x, y
    return None


class CubicOrder:
    """Exact arithmetic in Z[theta], theta a root of f_n.

    Elements are integer triples (c0, c1, c2) meaning c0 + c1 theta + c2 theta^2.
    """

    def __init__(self, inst: ThueInstance):
        self.inst = inst
        self.s = inst.fib + inst.luc
        self.p = inst.fib * inst.luc
        self.one = (1, 0, 0)
        self.theta = (0, 1, 0)
        self.delta = (-inst.fib, 1, 0)
        # theta^-1 = theta^2 - s theta + p and (theta - F)^-1 = theta^2 - L theta
        self.theta_inv = (self.p, -self.s, 1)
        self.delta_inv = (0, -inst.luc, 1)

    def mul(self, a, b):
        a0, a1, a2 = a
        b0, b1, b2 = b
        d0 = a0 * b0
        d1 = a0 * b1 + a1 * b0
        d2 = a0 * b2 + a1 * b1 + a2 * b0
        d3 = a1 * b2 + a2 * b1
        d4 = a2 * b2
        s, p = self.s, self.p
        # theta^3 = s theta^2 - p theta + 1
        # theta^4 = (s^2 - p) theta^2 + (1 - s p) theta + s
        return (
            d0 + d3 + s * d4,
            d1 - p * d3 + (1 - s * p) * d4,
            d2 + s * d3 + (s * s - p) * d4,
        )

    def pow(self, a, inv, k: int):
        """a^k, using ``inv`` = a^-1 for negative k."""
        base = a if k >= 0 else inv
        k = abs(k)
        result = self.one
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def unit(self, b1: int, b2: int, sign: int = 1):
        t = self.pow(self.theta, self.theta_inv, b1)
        d = self.pow(self.delta, self.delta_inv, b2)
        c0, c1, c2 = self.mul(t, d)
        return (sign * c0, sign * c1, sign * c2)

    def norm(self, a) -> int:
        """Exact norm N(a) as the determinant of multiplication by a."""
        cols = [self.mul(a, self.one), self.mul(a, self.theta), self.mul(a, (0, 0, 1))]
        (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = cols
        return a0 * (b1 * c2 - c1 * b2) - b0 * (a1 * c2 - c1 * a2) + c0 * (a1 * b2 - b1 * a2)

    @staticmethod
    def as_linear(a) -> Optional[tuple[int, int]]:
        """(x, y) with a = x - theta y, if a has no theta^2 term."""
        c0, c1, c2 = a
        if c2 != 0:
            return None
        return c0, -c1
