"""Certified resolution of the cubic Thue family (X - F_n Y)(X - L_n Y) X - Y^3 = +-1."""

__version__ = "0.1.0"

from .realball import Ball, InconclusiveError
from .sequences import ThueInstance, fib, lucas
from .solver import Solution, SolutionSet, solve

__all__ = [
    "Ball",
    "InconclusiveError",
    "Solution",
    "SolutionSet",
    "ThueInstance",
    "__version__",
    "fib",
    "lucas",
    "solve",
]
