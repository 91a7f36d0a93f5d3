"""Lower and upper bounds for log|y| and the absolute bound on n they imply.

The lower bound comes from the Baker-Wustholz estimate for a linear form in
three logarithms over Q(sqrt 5); the upper bound from the Bugeaud-Gyory
estimate for Thue equations.  Both are evaluated in ball arithmetic and
compared in log space.
"""

from __future__ import annotations

import math
from typing import Sequence

import mpmath

from .realball import Ball, InconclusiveError, constants, escalate

__all__ = [
    "BOUND_PREC",
    "NoCrossingError",
    "baker_constant",
    "baker_wustholz_constant",
    "bugeaud_gyory_bound",
    "c_b",
    "c_x",
    "family_heights",
    "initial_n_bound",
    "logy_lower_bound",
    "logy_upper_bound",
    "phase1_c2",
    "weil_height",
]

BOUND_PREC = 128


class NoCrossingError(RuntimeError):
    """The bisection bracket does not straddle the crossing."""


def weil_height(coeffs: Sequence[int], prec: int = 80) -> float:
    """Absolute logarithmic height of a root of an irreducible integer polynomial.

    ``coeffs`` lists the coefficients from the leading one down.  Only used to
    check the heights that enter the lower bound, so a float suffices.
    """
    d = len(coeffs) - 1
    with mpmath.workdps(int(prec * 0.3) + 10):
        rts = mpmath.polyroots(coeffs, maxsteps=200, extraprec=prec)
        total = mpmath.log(abs(coeffs[0])) + sum(mpmath.log(max(1, abs(r))) for r in rts)
        return float(total / d)


def family_heights(prec: int = BOUND_PREC) -> tuple[Ball, Ball, Ball]:
    """Heights used for log alpha, log sqrt 5 and log(sqrt 5 - 1).

    The three values are (1/2) log alpha, log sqrt 5 and log 2; the last is
    the height of sqrt 5 - 1, whose conjugates have product 4.
    """
    c = constants(prec)
    return (c.log_alpha / 2, c.log_sqrt5, Ball(2, 0, prec).log())


def baker_wustholz_constant(t: int, D: int, heights: Sequence[Ball]) -> Ball:
    """18 (t+1)! t^(t+1) (32 D)^(t+2) log(2 t D) h_1 ... h_t."""
    if len(heights) != t:
        raise ValueError("need one height per logarithm")
    prec = min(h.prec for h in heights)
    head = 18 * math.factorial(t + 1) * t ** (t + 1) * (32 * D) ** (t + 2)
    value = Ball(head, 0, prec) * Ball(2 * t * D, 0, prec).log()
    for h in heights:
        value = value * h
    return value


def baker_constant(prec: int = BOUND_PREC) -> Ball:
    """The constant C multiplying log B for the family's three logarithms (about 1.253e13)."""
    return baker_wustholz_constant(3, 2, family_heights(prec))


def bugeaud_gyory_bound(r: int, N: int, reg_upper: Ball, log_hb: Ball) -> Ball:
    """Upper bound for max(log|x|, log|y|) of a Thue equation.

    ``reg_upper`` bounds the regulator from above and ``log_hb`` is
    log(H B) with H the coefficient bound and B >= max(|m|, e).
    """
    head = 3 ** (r + 27) * (r + 1) ** (7 * r + 19) * N ** (2 * N + 6 * r + 14)
    lr = reg_upper.log()
    big = lr if lr.lo >= 1 else Ball(1, 0, reg_upper.prec) if lr.hi <= 1 else None
    if big is None:
        raise InconclusiveError("cannot decide max(log R, 1)")
    return head * reg_upper * big * (reg_upper + log_hb)


def logy_upper_bound(n: int, prec: int = BOUND_PREC) -> Ball:
    """3^94 2n^2 log(2n^2) (2n^2 + (2n-1) log alpha + 1)."""
    if n < 1:
        raise ValueError("n must be positive")
    la = constants(prec).log_alpha
    reg = Ball(2 * n * n, 0, prec)
    log_hb = (2 * n - 1) * la + 1
    return bugeaud_gyory_bound(2, 3, reg, log_hb)


def _log_lower_exponent(n: int, prec: int) -> Ball:
    c = baker_constant(prec)
    la = constants(prec).log_alpha
    return 2 * la / (1 + c) * n - Ball(n, 0, prec).log() - 5


def logy_lower_bound(n: int, prec: int = BOUND_PREC) -> Ball:
    """exp(2 log alpha / (1 + C) n - log n - 5)."""
    if n < 10:
        raise ValueError("the lower bound is derived for n >= 10")
    return _log_lower_exponent(n, prec).exp()


def _crossed(n: int, prec: int) -> bool:
    """True when the lower bound certifiably exceeds the upper bound at n."""
    return _log_lower_exponent(n, prec) > logy_upper_bound(n, prec).log()


def initial_n_bound(lo: int = 10, hi: int = 10**16, prec: int = BOUND_PREC) -> int:
    """Largest n in [lo, hi) at which the lower bound does not exceed the upper one.

    Every n above the returned value has lower bound > upper bound, so no
    non-trivial solution exists there.  Ambiguous comparisons near the
    crossing are retried at higher precision.
    """

    def crossed(n: int) -> bool:
        return escalate(lambda p: _crossed(n, p), prec)

    if crossed(lo) or not crossed(hi):
        raise NoCrossingError(f"[{lo}, {hi}] does not bracket the crossing")
    a, b = lo, hi
    while b - a > 1:
        m = (a + b) // 2
        if crossed(m):
            b = m
        else:
            a = m
    return a


def _u(n: int, prec: int) -> Ball:
    return logy_upper_bound(n, prec)


def phase1_c2(n: int, prec: int = BOUND_PREC) -> Ball:
    """6 U(n) + 39, with U(n) the log|y| upper bound."""
    return 6 * _u(n, prec) + 39


def c_x(n: int, prec: int = BOUND_PREC) -> Ball:
    """Bound 42 U(n) + 42 log(alpha) n + 43 on the coefficients x_i."""
    la = constants(prec).log_alpha
    return 42 * _u(n, prec) + 42 * la * n + 43


def c_b(n: int, prec: int = BOUND_PREC) -> Ball:
    """Bound 7/n (U(n) + n log alpha + 1) on the unit exponents b_1, b_2."""
    la = constants(prec).log_alpha
    return Ball(7, 0, prec) / n * (_u(n, prec) + n * la + 1)
