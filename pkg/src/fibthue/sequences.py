"""Fibonacci and Lucas numbers and the family member they define."""

from __future__ import annotations

from dataclasses import dataclass, field

from .realball import Ball, constants

__all__ = ["ThueInstance", "check_fib_envelope", "fib", "fib_pair", "lucas"]


def fib_pair(n: int) -> tuple[int, int]:
    """Return ``(F_n, F_{n+1})`` by plain iteration."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a, b


def fib(n: int) -> int:
    return fib_pair(n)[0]


def lucas(n: int) -> int:
    if n < 0:
        raise ValueError("index must be nonnegative")
    a, b = 2, 1
    for _ in range(n):
        a, b = b, a + b
    return a


@dataclass(frozen=True)
class ThueInstance:
    """The cubic form (X - F_n Y)(X - L_n Y) X - Y^3 for one n."""

    n: int
    fib: int = field(init=False)
    luc: int = field(init=False)
    coeff_bound: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        f, luc = fib(self.n), lucas(self.n)
        object.__setattr__(self, "fib", f)
        object.__setattr__(self, "luc", luc)
        object.__setattr__(self, "coeff_bound", f * luc)

    def form(self, x: int, y: int) -> int:
        return (x - self.fib * y) * (x - self.luc * y) * x - y**3

    def poly(self, x):
        """f_n(x) = (x - F_n)(x - L_n) x - 1, for any ring element x."""
        return (x - self.fib) * (x - self.luc) * x - 1

    @property
    def poly_coeffs(self) -> tuple[int, int, int, int]:
        """Coefficients of f_n, leading first."""
        s, p = self.fib + self.luc, self.fib * self.luc
        return (1, -s, p, -1)


def check_fib_envelope(n: int, prec: int = 128) -> bool:
    """Certify alpha^(n-2) <= F_n - 11 alpha^-n and F_n + 11 alpha^-n <= alpha^(n-1).

    Raises ``ValueError`` for n < 6 and ``InconclusiveError`` when the balls
    at this precision cannot separate the two sides.
    """
    if n < 6:
        raise ValueError("the envelope is only claimed for n >= 6")
    a = constants(max(prec, 53)).alpha
    f = Ball(fib(n), 0, prec)
    tail = 11 * a ** (-n)
    return (a ** (n - 2) <= f - tail) and (f + tail <= a ** (n - 1))
