"""Certified enclosures of the three real roots of f_n and checks of their expansions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .realball import Ball, InconclusiveError, constants
from .sequences import ThueInstance

__all__ = [
    "CheckReport",
    "NoSignChangeError",
    "RootTriple",
    "approx_roots",
    "certify_root_windows",
    "certify_log_expansions",
    "dyadic_sign",
    "working_prec",
]


class NoSignChangeError(InconclusiveError):
    """The bracket around a Newton approximation did not certify a root."""


@dataclass(frozen=True)
class RootTriple:
    """Enclosures of the roots near F_n (r1), near L_n (r2) and near 0 (r3)."""

    n: int
    r1: Ball
    r2: Ball
    r3: Ball
    prec: int

    def __iter__(self):
        return iter((self.r1, self.r2, self.r3))

    def __getitem__(self, i: int) -> Ball:
        """1-based access matching the root labels."""
        return (self.r1, self.r2, self.r3)[i - 1]


def working_prec(n: int) -> int:
    """Per-n precision: 3n + 30 bits, and never below 64."""
    return max(64, 3 * n + 30)


def dyadic_sign(inst: ThueInstance, num: int, k: int) -> int:
    """Exact sign of f_n(num / 2^k), computed as a sign of an integer."""
    s, p = inst.fib + inst.luc, inst.fib * inst.luc
    h = 1 << k
    v = num**3 - s * num * num * h + p * num * h * h - h * h * h
    return (v > 0) - (v < 0)


def _newton(inst: ThueInstance, seed, wp: int):
    s, p = inst.fib + inst.luc, inst.fib * inst.luc
    with mpmath.workprec(wp):
        x = mpmath.mpf(seed)
        tol = mpmath.ldexp(1, -wp + 8)
        for _ in range(4 * wp.bit_length() + 60):
            fx = ((x - s) * x + p) * x - 1
            dfx = (3 * x - 2 * s) * x + p
            step = fx / dfx
            x -= step
            if abs(step) <= tol * max(1, abs(x)):
                break
        return x


def _scaled_int(x: mpmath.mpf, k: int) -> int:
    """floor(x * 2^k), exactly."""
    man, exp = x.man_exp
    shift = exp + k
    return man << shift if shift >= 0 else man >> -shift


def approx_roots(inst: ThueInstance, prec: int = 128) -> RootTriple:
    """Enclose the three roots of f_n to absolute radius 2^-(prec+8).

    Newton runs on plain floating-point midpoints, seeded from F_n, L_n and
    sqrt(5) alpha^(-2n).  Each approximation is then certified by an exact
    sign change of f_n at the two neighbouring dyadic points.
    """
    n = inst.n
    if n < 3:
        raise ValueError("f_n has only one real root for n < 3")
    if prec < 64:
        raise ValueError("prec must be at least 64")
    k = prec + 8
    size = inst.luc.bit_length() + 2
    wp = k + size + 32
    with mpmath.workprec(wp):
        small_seed = mpmath.sqrt(5) * ((1 + mpmath.sqrt(5)) / 2) ** (-2 * n)
    seeds = (inst.fib, inst.luc, small_seed)
    balls = []
    for seed in seeds:
        x = _newton(inst, seed, wp)
        num = _scaled_int(x, k)
        lo, hi = dyadic_sign(inst, num - 1, k), dyadic_sign(inst, num + 1, k)
        if lo == 0 or hi == 0 or lo == hi:
            raise NoSignChangeError(f"no certified root near {mpmath.nstr(x, 15)} for n={n}")
        ball_prec = k + size + 4
        mid = mpmath.libmp.from_man_exp(num, -k)
        balls.append(Ball(mid, Fraction(1, 1 << k), ball_prec))
    r1, r2, r3 = balls
    return RootTriple(n=n, r1=r1, r2=r2, r3=r3, prec=prec)


@dataclass(frozen=True)
class CheckReport:
    n: int
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _require_pipeline_range(inst: ThueInstance) -> None:
    if inst.n < 10:
        raise ValueError("the expansions are only certified for n >= 10")


def certify_root_windows(inst: ThueInstance, roots: RootTriple) -> CheckReport:
    """Check the sign changes of f_n at p -/+ kappa for the three root windows.

    The windows are F_n +- 6 alpha^(-2n), L_n +- 4 alpha^(-2n) and
    sqrt(5) alpha^(-2n) +- alpha^(-4n).  Each check also confirms that the
    root enclosure sits inside its window.
    """
    _require_pipeline_range(inst)
    n = inst.n
    prec = max(roots.prec, working_prec(n))
    c = constants(prec)
    e2 = c.alpha ** (-2 * n)
    windows = {
        "r1": (Ball(inst.fib, 0, prec), 6 * e2, roots.r1),
        "r2": (Ball(inst.luc, 0, prec), 4 * e2, roots.r2),
        "r3": (c.sqrt5 * e2, e2 * e2, roots.r3),
    }
    checks = {}
    for name, (p, kappa, r) in windows.items():
        a, b = p - kappa, p + kappa
        fa, fb = inst.poly(a), inst.poly(b)
        checks[name] = (fa * fb).sign() < 0 and a.lo < r.lo and r.hi < b.hi
    return CheckReport(n=n, checks=checks)


def certify_log_expansions(inst: ThueInstance, roots: RootTriple) -> CheckReport:
    """Check the six logarithmic expansions of |root| and |root - F_n|."""
    _require_pipeline_range(inst)
    n = inst.n
    prec = max(roots.prec, working_prec(n))
    c = constants(prec)
    la, ls5 = c.log_alpha, c.log_sqrt5
    e1 = c.alpha ** (-n)
    e2 = e1 * e1
    f = Ball(inst.fib, 0, prec)
    nla = n * la
    rows = {
        "log|r1|": (roots.r1, nla - ls5, 3 * e2),
        "log|r1-F|": (roots.r1 - f, -2 * nla + (Ball(5, 0, prec) / (c.sqrt5 - 1)).log(), 6 * e1),
        "log|r2|": (roots.r2, nla, 4 * e2),
        "log|r2-F|": (roots.r2 - f, nla + (1 - 1 / c.sqrt5).log(), 6 * e2),
        "log|r3|": (roots.r3, -2 * nla + ls5, e2),
        "log|r3-F|": (roots.r3 - f, nla - ls5, 3 * e2),
    }
    checks = {}
    for name, (value, approx, radius) in rows.items():
        diff = abs(abs(value.with_prec(prec)).log() - approx)
        checks[name] = diff.hi <= radius.lo
    return CheckReport(n=n, checks=checks)
