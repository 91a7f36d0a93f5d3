"""Midpoint-radius real balls with rigorous error tracking.

A :class:`Ball` stores a binary floating-point midpoint (an mpmath raw ``mpf``
tuple rounded to ``prec`` bits) and a short, upward-rounded radius.  Every
operation returns a ball that contains the exact result of applying the
operation to any points of the inputs.

Elementary functions (log, exp) are evaluated by mpmath with ``GUARD`` extra
bits; the radius charges 2**8 guarded ulps for them, which covers mpmath's
documented few-ulp accuracy with a wide margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational
from typing import Callable, TypeVar

import mpmath
from mpmath import libmp as _lm

__all__ = [
    "Ball",
    "BallDomainError",
    "ConstantTable",
    "InconclusiveError",
    "ball_log",
    "ball_max",
    "constants",
    "escalate",
]

RAD_PREC = 30
GUARD = 30

_RN = _lm.round_nearest
_RU = _lm.round_ceiling
_RD = _lm.round_floor
_ZERO = _lm.fzero
_ONE = _lm.fone


class InconclusiveError(ArithmeticError):
    """A certified decision needs more working precision."""


class BallDomainError(ValueError):
    """The ball meets a point where the function is undefined."""


def _pow2(e: int):
    return (0, 1, e, 1)


def _rnd_err(x, prec: int):
    """Upper bound for the error of rounding ``x`` to nearest at ``prec`` bits."""
    if x == _ZERO:
        return _ZERO
    _, _, exp, bc = x
    return _pow2(exp + bc - prec)


def _radd(*terms):
    acc = _ZERO
    for t in terms:
        acc = _lm.mpf_add(acc, t, RAD_PREC, _RU)
    return acc


def _rmul(a, b):
    return _lm.mpf_mul(a, b, RAD_PREC, _RU)


def _up(x):
    """|x| rounded up to radius precision."""
    return _lm.mpf_abs(x, RAD_PREC, _RU)


def _raw_from(value, prec: int):
    """(raw midpoint, rounding error) for an exact scalar."""
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, Integral):
        v = int(value)
        m = _lm.from_int(v, prec, _RN)
        err = _ZERO if abs(v).bit_length() <= prec else _rnd_err(m, prec)
        return m, err
    if isinstance(value, Rational):
        p, q = int(value.numerator), int(value.denominator)
        if q == 1:
            return _raw_from(p, prec)
        m = _lm.mpf_div(_lm.from_int(p), _lm.from_int(q), prec, _RN)
        exact = _to_fraction(m) == Fraction(p, q)
        return m, (_ZERO if exact else _rnd_err(m, prec))
    if isinstance(value, float):
        m = _lm.from_float(value)
        if prec >= 53:
            return m, _ZERO
        r = _lm.mpf_pos(m, prec, _RN)
        return r, _rnd_err(r, prec)
    if isinstance(value, mpmath.mpf):
        r = _lm.mpf_pos(value._mpf_, prec, _RN)
        return r, (_ZERO if r == value._mpf_ else _rnd_err(r, prec))
    if isinstance(value, tuple):
        r = _lm.mpf_pos(value, prec, _RN)
        return r, (_ZERO if r == value else _rnd_err(r, prec))
    raise TypeError(f"cannot build a Ball from {type(value).__name__}")


def _raw_up(value):
    """A raw mpf at radius precision that is >= the exact scalar ``value``."""
    if isinstance(value, Ball):
        raise TypeError("radius must be a scalar")
    if isinstance(value, Integral):
        return _lm.from_int(int(value), RAD_PREC, _RU)
    if isinstance(value, Rational):
        return _lm.mpf_div(_lm.from_int(int(value.numerator)), _lm.from_int(int(value.denominator)), RAD_PREC, _RU)
    if isinstance(value, float):
        return _lm.mpf_pos(_lm.from_float(value), RAD_PREC, _RU)
    if isinstance(value, mpmath.mpf):
        return _lm.mpf_pos(value._mpf_, RAD_PREC, _RU)
    if isinstance(value, tuple):
        return _lm.mpf_pos(value, RAD_PREC, _RU)
    raise TypeError(f"unsupported radius type {type(value).__name__}")


def _to_fraction(x) -> Fraction:
    p, q = _lm.to_rational(x)
    return Fraction(int(p), int(q))


class Ball:
    """A real number known to lie in ``[mid - rad, mid + rad]``."""

    __slots__ = ("_m", "_r", "prec")

    def __init__(self, mid=0, rad=0, prec: int = 128):
        m, err = _raw_from(mid, prec)
        r = _raw_up(rad)
        if _lm.mpf_lt(r, _ZERO):
            raise ValueError("radius must be nonnegative")
        self._m = m
        self._r = _radd(r, err)
        self.prec = int(prec)

    @classmethod
    def _raw(cls, m, r, prec: int) -> "Ball":
        b = cls.__new__(cls)
        b._m = m
        b._r = r
        b.prec = prec
        return b

    # -- inspection ---------------------------------------------------
    @property
    def mid(self) -> mpmath.mpf:
        return mpmath.mpf(self._m)

    @property
    def rad(self) -> mpmath.mpf:
        return mpmath.mpf(self._r)

    @property
    def lo(self) -> Fraction:
        return _to_fraction(self._m) - _to_fraction(self._r)

    @property
    def hi(self) -> Fraction:
        return _to_fraction(self._m) + _to_fraction(self._r)

    @classmethod
    def from_interval(cls, lo, hi, prec: int = 128) -> "Ball":
        """Smallest representable ball around the exact interval [lo, hi]."""
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2, prec)

    def _lo_raw(self, rnd=_RD, prec: int = 0):
        return _lm.mpf_sub(self._m, self._r, prec or 0, rnd)

    def _hi_raw(self, rnd=_RU, prec: int = 0):
        return _lm.mpf_add(self._m, self._r, prec or 0, rnd)

    def __repr__(self) -> str:
        return f"Ball({mpmath.nstr(self.mid, 20)} +/- {mpmath.nstr(self.rad, 3)})"

    def __float__(self) -> float:
        return _lm.to_float(self._m)

    def __contains__(self, value) -> bool:
        if isinstance(value, Ball):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, float):
            value = Fraction(value)
        elif isinstance(value, mpmath.mpf):
            value = _to_fraction(value._mpf_)
        v = Fraction(value)
        return self.lo <= v <= self.hi

    def contains_zero(self) -> bool:
        return 0 in self

    def rel_rad(self) -> float:
        if self._m == _ZERO:
            return math.inf
        return _lm.to_float(_lm.mpf_div(self._r, _lm.mpf_abs(self._m), 20, _RU))

    def with_prec(self, prec: int) -> "Ball":
        m, err = _raw_from(self._m, prec)
        return Ball._raw(m, _radd(self._r, err), prec)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Ball":
        if isinstance(other, Ball):
            return other
        return Ball(other, 0, self.prec)

    def __neg__(self) -> "Ball":
        return Ball._raw(_lm.mpf_neg(self._m), self._r, self.prec)

    def __pos__(self) -> "Ball":
        return self

    def __abs__(self) -> "Ball":
        if _lm.mpf_sign(self._m) >= 0:
            return self
        return -self

    def __add__(self, other) -> "Ball":
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        m = _lm.mpf_add(self._m, o._m, p, _RN)
        return Ball._raw(m, _radd(self._r, o._r, _rnd_err(m, p)), p)

    __radd__ = __add__

    def __sub__(self, other) -> "Ball":
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        m = _lm.mpf_sub(self._m, o._m, p, _RN)
        return Ball._raw(m, _radd(self._r, o._r, _rnd_err(m, p)), p)

    def __rsub__(self, other) -> "Ball":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Ball":
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        m = _lm.mpf_mul(self._m, o._m, p, _RN)
        r = _radd(
            _rmul(_up(self._m), o._r),
            _rmul(_up(o._m), self._r),
            _rmul(self._r, o._r),
            _rnd_err(m, p),
        )
        return Ball._raw(m, r, p)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Ball":
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        # |o| >= low > 0 everywhere on the divisor ball
        low = _lm.mpf_sub(_lm.mpf_abs(o._m), o._r, RAD_PREC, _RD)
        if _lm.mpf_le(low, _ZERO):
            raise BallDomainError("division by a ball containing zero")
        m = _lm.mpf_div(self._m, o._m, p, _RN)
        num = _radd(self._r, _rmul(_up(m), o._r))
        r = _radd(_lm.mpf_div(num, low, RAD_PREC, _RU), _rnd_err(m, p), _rmul(_up(m), _pow2(-p)))
        return Ball._raw(m, r, p)

    def __rtruediv__(self, other) -> "Ball":
        return self._coerce(other) / self

    def __pow__(self, k) -> "Ball":
        if not isinstance(k, Integral):
            raise TypeError("Ball powers take integer exponents only")
        k = int(k)
        if k < 0:
            return 1 / (self ** (-k))
        result = Ball(1, 0, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def sqrt(self) -> "Ball":
        lo = self._lo_raw(_RD, RAD_PREC)
        if _lm.mpf_lt(lo, _ZERO):
            raise BallDomainError("sqrt of a ball reaching negative values")
        p = self.prec
        m = _lm.mpf_sqrt(self._m, p, _RN)
        if self._r == _ZERO:
            return Ball._raw(m, _rnd_err(m, p), p)
        if lo == _ZERO:
            # sqrt is 1/2-Holder: |sqrt(x) - sqrt(m)| <= sqrt(r)
            r = _lm.mpf_sqrt(_radd(self._r, self._r), RAD_PREC, _RU)
        else:
            r = _lm.mpf_div(self._r, _lm.mpf_sqrt(lo, RAD_PREC, _RD), RAD_PREC, _RU)
        return Ball._raw(m, _radd(r, _rnd_err(m, p)), p)

    def log(self) -> "Ball":
        lo = self._lo_raw(_RD, RAD_PREC)
        if _lm.mpf_le(lo, _ZERO):
            raise BallDomainError("log of a ball touching (-inf, 0]")
        p = self.prec
        g = _lm.mpf_log(self._m, p + GUARD, _RN)
        m = _lm.mpf_pos(g, p, _RN)
        big = g if _lm.mpf_gt(_lm.mpf_abs(g), _ONE) else _ONE
        ferr = _radd(_rnd_err(m, p), _rmul(_up(big), _pow2(-(p + GUARD) + 8)))
        prop = _lm.mpf_div(self._r, lo, RAD_PREC, _RU)
        return Ball._raw(m, _radd(ferr, prop), p)

    def exp(self) -> "Ball":
        p = self.prec
        g = _lm.mpf_exp(self._m, p + GUARD, _RN)
        m = _lm.mpf_pos(g, p, _RN)
        ferr = _radd(_rnd_err(m, p), _rmul(_up(g), _pow2(-(p + GUARD) + 8)))
        # exp(m + t) - exp(m) <= exp(m) * (exp(r) - 1) <= exp(m) * r * exp(r)
        er = _lm.mpf_exp(self._r, RAD_PREC, _RU)
        growth = _rmul(_rmul(_up(g), self._r), er)
        growth = _rmul(growth, _lm.mpf_add(_ONE, _pow2(-p + 2), RAD_PREC, _RU))
        return Ball._raw(m, _radd(ferr, growth), p)

    # -- certified decisions -----------------------------------------
    def _cmp(self, other) -> int:
        """-1 if certainly below, +1 if certainly above, 0 if overlapping."""
        o = self._coerce(other)
        if _lm.mpf_lt(_lm.mpf_add(self._m, self._r, 0, _RU), _lm.mpf_sub(o._m, o._r, 0, _RD)):
            return -1
        if _lm.mpf_gt(_lm.mpf_sub(self._m, self._r, 0, _RD), _lm.mpf_add(o._m, o._r, 0, _RU)):
            return 1
        return 0

    def __lt__(self, other) -> bool:
        c = self._cmp(other)
        if c == 0:
            # touching endpoints still decide "not less" when self.lo >= other.hi
            o = self._coerce(other)
            if self.lo >= o.hi:
                return False
            raise InconclusiveError("overlapping balls in comparison")
        return c < 0

    def __gt__(self, other) -> bool:
        return self._coerce(other) < self

    def __le__(self, other) -> bool:
        o = self._coerce(other)
        if self.hi <= o.lo:
            return True
        if self.lo > o.hi:
            return False
        raise InconclusiveError("overlapping balls in comparison")

    def __ge__(self, other) -> bool:
        return self._coerce(other) <= self

    def sign(self) -> int:
        """Certified sign; raises if the ball straddles zero."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self._m == _ZERO and self._r == _ZERO:
            return 0
        raise InconclusiveError("sign not determined")

    def floor(self) -> int:
        a, b = math.floor(self.lo), math.floor(self.hi)
        if a != b:
            raise InconclusiveError("floor not determined")
        return a

    def ceil(self) -> int:
        a, b = math.ceil(self.lo), math.ceil(self.hi)
        if a != b:
            raise InconclusiveError("ceil not determined")
        return a

    def nearest_int(self) -> int:
        """Nearest integer, ties away from zero, certified over the whole ball."""
        a, b = _round_half_away(self.lo), _round_half_away(self.hi)
        if a != b:
            raise InconclusiveError("nearest integer not determined")
        return a

    def upper_int(self) -> int:
        """Smallest integer that is >= every point of the ball."""
        return math.ceil(self.hi)

    def lower_int(self) -> int:
        return math.floor(self.lo)


def _round_half_away(v: Fraction) -> int:
    if v >= 0:
        return math.floor(v + Fraction(1, 2))
    return -math.floor(-v + Fraction(1, 2))


def ball_max(a: Ball, b: Ball) -> Ball:
    """Enclosure of max(u, v) over u in a, v in b."""
    return Ball.from_interval(max(a.lo, b.lo), max(a.hi, b.hi), min(a.prec, b.prec))


def ball_log(x: Ball) -> Ball:
    return x.log()


def ball_exp(x: Ball) -> Ball:
    return x.exp()


def ball_sqrt(x: Ball) -> Ball:
    return x.sqrt()


@dataclass(frozen=True)
class ConstantTable:
    alpha: Ball
    sqrt5: Ball
    log_alpha: Ball
    log_sqrt5: Ball
    log_sqrt5_minus1: Ball
    prec: int


@lru_cache(maxsize=64)
def constants(prec: int) -> ConstantTable:
    """The golden ratio, sqrt(5) and the three logarithms at ``prec`` bits."""
    if prec < 53:
        raise ValueError("constants need at least 53 bits")
    wp = prec + 16
    sqrt5 = Ball(5, 0, wp).sqrt()
    alpha = (1 + sqrt5) / 2
    table = ConstantTable(
        alpha=alpha.with_prec(prec),
        sqrt5=sqrt5.with_prec(prec),
        log_alpha=alpha.log().with_prec(prec),
        log_sqrt5=sqrt5.log().with_prec(prec),
        log_sqrt5_minus1=(sqrt5 - 1).log().with_prec(prec),
        prec=prec,
    )
    return table


T = TypeVar("T")


def escalate(fn: Callable[[int], T], prec: int, cap: int | None = None) -> T:
    """Call ``fn(prec)``, doubling ``prec`` on :class:`InconclusiveError` up to ``cap``.

    The default cap is 16 times the starting precision.
    """
    limit = 16 * prec if cap is None else cap
    p = prec
    while True:
        try:
            return fn(p)
        except InconclusiveError:
            if 2 * p > limit:
                raise
            p *= 2
