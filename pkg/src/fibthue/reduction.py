"""Bound reduction with lattices, the three reduction phases, and the convergent check.

A reduction step takes an inequality |sum x_i log_i| <= c2 exp(-c3 n) with
|x_i| <= X_i and turns it into an explicit bound on n.  The lattice is built
from the logs scaled by ``c`` and rounded to nearest integers; the length of
its shortest vector (or the distance from a target point, when the last
coefficient is the constant 1) then forbids very small values of the form.

Three ways to obtain the lattice constant are provided:

``"shortest"``
    exact shortest vector of the lattice with row basis
    (1,0,A1), (0,1,A2), (0,0,A3).  Certifying.
``"inhomogeneous"``
    exact distance from (0, -A3) to the lattice with row basis (1, A1),
    (0, A2); for forms b1 L1 + b2 L2 + L3.  Certifying.
``"column_norm"``
    LLL-reduce the rows of the 3x3 matrix with last row (A1, A2, A3) and take
    the largest Euclidean column norm as the constant.  This matches how
    published reduction chains are often computed, but nothing guarantees the
    inequality it relies on, so results carry ``certified=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .bounds import c_b, c_x, initial_n_bound, phase1_c2
from .lattice import IntLattice, closest_vector, lll, shortest_vector
from .realball import Ball, InconclusiveError, constants, escalate
from .roots import RootTriple, approx_roots, working_prec
from .sequences import ThueInstance, lucas
from .units import UnitSystem, build_units

__all__ = [
    "CASES",
    "TRIVIAL_EXPONENTS",
    "ConditionFailedError",
    "PerNResult",
    "PhaseResult",
    "PrecisionExhaustedError",
    "ReductionState",
    "continued_fraction",
    "exponent_box",
    "convergent_check",
    "convergent_solutions",
    "lambda_logs",
    "phase1",
    "phase2",
    "phase3",
    "reduce_with_retry",
    "smart_reduce",
    "smart_reduce_inhomogeneous",
]

# (j, k, l): j indexes the smallest beta, (k, l) the pair used for the unit exponents
CASES = ((1, 3, 2), (2, 1, 3), (3, 1, 2))

# exponent pairs of the trivial solutions: +-(1,0), +-(0,1), +-(F_n,1), +-(L_n,1)
TRIVIAL_EXPONENTS = ((0, 0), (1, 0), (0, 1), (-1, -1))

RETRY_FACTOR = 10**3
MAX_RETRIES = 5


class ConditionFailedError(ArithmeticError):
    """The lattice constant is too small for the reduction inequality."""


class PrecisionExhaustedError(InconclusiveError):
    """A continued-fraction digit could not be certified from the ball."""


@dataclass(frozen=True)
class ReductionState:
    """Inputs and outcome of one reduction step, with the exact integers that certify it."""

    c: int
    c2: Ball
    c3: Ball
    coeff_bounds: tuple[int, ...]
    scaled_logs: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]
    c4_sq: int
    S: int
    T: Fraction
    new_bound: int
    rule: str
    target: Optional[tuple[int, ...]] = None
    value: Optional[Ball] = None
    excluded: tuple[tuple[int, int], ...] = ()

    @property
    def certified(self) -> bool:
        return self.rule in ("shortest", "inhomogeneous")

    @property
    def condition_holds(self) -> bool:
        return self.c4_sq > self.T * self.T + self.S


def _scale_logs(c: int, logs: Sequence[Ball]) -> tuple[int, ...]:
    """Nearest integers to c * log_i, certified (raises if a ball is too wide)."""
    return tuple((c * lg).nearest_int() for lg in logs)


def _bound_from(c: int, c2: Ball, c3: Ball, c4_sq: int, S: int, T: Fraction, prec: int) -> tuple[int, Ball]:
    """floor of (log(c c2) - log(sqrt(c4^2 - S) - T)) / c3, taken at the ball's upper end."""
    gap = Ball(c4_sq - S, 0, prec).sqrt() - Ball(T, 0, prec)
    if gap.lo <= 0:
        raise ConditionFailedError("sqrt(c4^2 - S) - T is not certifiably positive")
    value = ((c * c2).log() - gap.log()) / c3
    return math.floor(value.hi), value


def _coeff_ints(coeff_bounds: Sequence) -> tuple[int, ...]:
    out = []
    for b in coeff_bounds:
        if isinstance(b, Ball):
            out.append(math.floor(b.hi))
        else:
            out.append(int(b))
    return tuple(out)


def smart_reduce(
    c: int,
    c2: Ball,
    c3: Ball,
    coeff_bounds: Sequence,
    logs: Sequence[Ball],
    rule: str = "shortest",
    delta: Fraction = Fraction(3, 4),
) -> ReductionState:
    """One reduction step for a homogeneous form x1 L1 + x2 L2 + x3 L3.

    ``coeff_bounds`` are upper bounds X_i on |x_i| (balls are floored at their
    upper end, since the x_i are integers).  S = X1^2 + X2^2 and
    T = (1 + X1 + X2 + X3) / 2.
    """
    if len(logs) != 3 or len(coeff_bounds) != 3:
        raise ValueError("a reduction step takes three logs and three coefficient bounds")
    if rule not in ("shortest", "column_norm"):
        raise ValueError(f"unknown rule {rule!r}")
    X = _coeff_ints(coeff_bounds)
    A = _scale_logs(c, logs)
    rows = ((1, 0, A[0]), (0, 1, A[1]), (0, 0, A[2]))
    if A[2] == 0:
        raise ValueError("scaled logs give a singular lattice")
    if rule == "shortest":
        lat = IntLattice(rows)
        _, c4_sq = shortest_vector(lat)
        basis = lll(lat, delta).rows
    else:
        stacked = ((1, 0, 0), (0, 1, 0), A)
        basis = lll(IntLattice(stacked), delta).rows
        col_sq = max(sum(v * v for v in col) for col in zip(*basis))
        c4_sq = math.isqrt(col_sq)
    S = X[0] ** 2 + X[1] ** 2
    T = Fraction(1 + sum(X), 2)
    if not c4_sq > T * T + S:
        raise ConditionFailedError(f"c4^2 = {c4_sq} does not exceed T^2 + S")
    prec = max(c2.prec, c3.prec)
    new, value = _bound_from(c, c2, c3, c4_sq, S, T, prec)
    return ReductionState(c, c2, c3, X, A, tuple(basis), c4_sq, S, T, new, rule, value=value)


def smart_reduce_inhomogeneous(
    c: int,
    c2: Ball,
    c3: Ball,
    coeff_bounds: Sequence,
    logs: Sequence[Ball],
    delta: Fraction = Fraction(3, 4),
    exclude: Iterable[tuple[int, int]] = (),
) -> ReductionState:
    """One reduction step for b1 L1 + b2 L2 + L3 with |b_i| <= X_i.

    With A_i the scaled logs, every admissible (b1, b2) gives the lattice
    point (b1, b1 A1 + b2 A2) whose distance to (0, -A3) is at least the
    exact minimum distance l.  So |b1 A1 + b2 A2 + A3|^2 >= l^2 - X1^2, and
    rounding costs at most T = (1 + X1 + X2) / 2.

    Exponent pairs listed in ``exclude`` are left out of the minimum.  They
    are pairs already known not to come from a solution of interest (the
    trivial solutions), whose forms can be genuinely tiny.
    """
    if len(logs) != 3 or len(coeff_bounds) != 2:
        raise ValueError("need three logs and two coefficient bounds")
    X = _coeff_ints(coeff_bounds)
    A = _scale_logs(c, logs)
    if A[1] == 0:
        raise ValueError("scaled logs give a singular lattice")
    lat = IntLattice(((1, A[0]), (0, A[1])))
    target = (0, -A[2])
    excluded = frozenset(exclude)

    def skip(w) -> bool:
        b1 = w[0]
        b2, rem = divmod(w[1] - b1 * A[0], A[1])
        return rem == 0 and (b1, b2) in excluded

    _, dist_sq = closest_vector(lat, target, skip if excluded else None)
    S = X[0] ** 2
    T = Fraction(1 + X[0] + X[1], 2)
    if not dist_sq > T * T + S:
        raise ConditionFailedError(f"distance^2 = {dist_sq} does not exceed T^2 + S")
    prec = max(c2.prec, c3.prec)
    new, value = _bound_from(c, c2, c3, dist_sq, S, T, prec)
    basis = lll(lat, delta).rows
    return ReductionState(
        c, c2, c3, X, A, tuple(basis), dist_sq, S, T, new, "inhomogeneous", target=target, value=value,
        excluded=tuple(sorted(excluded)),
    )


def reduce_with_retry(step, c: int, factor: int = RETRY_FACTOR, retries: int = MAX_RETRIES) -> ReductionState:
    """Call ``step(c)``, multiplying c by ``factor`` after each failed condition."""
    last: Exception | None = None
    for _ in range(retries + 1):
        try:
            return step(c)
        except ConditionFailedError as exc:
            last = exc
            c *= factor
    raise ConditionFailedError(f"condition still failing after {retries} retries: {last}")


# -- phase 1 ----------------------------------------------------------------


def _phase1_step(N: int, rule: str, delta: Fraction, c_override: Optional[int] = None) -> ReductionState:
    X = math.floor(c_x(N).hi)
    c0 = X**3 if c_override is None else c_override

    def step(c: int) -> ReductionState:
        def attempt(prec: int) -> ReductionState:
            k = constants(prec)
            logs = (k.log_alpha, k.log_sqrt5, k.log_sqrt5_minus1)
            c2 = phase1_c2(N, prec)
            c3 = 2 * k.log_alpha
            return smart_reduce(c, c2, c3, (X, X, X), logs, rule=rule, delta=delta)

        return escalate(attempt, c.bit_length() + 64)

    return reduce_with_retry(step, c0)


@dataclass
class Phase1Result:
    start: int
    chain: list[int]
    steps: list[ReductionState]

    @property
    def bound(self) -> int:
        return self.chain[-1] if self.chain else self.start


def phase1(start: Optional[int] = None, rule: str = "shortest", delta: Fraction = Fraction(3, 4)) -> Phase1Result:
    """Iterate reduction steps on the three-log form until the bound stops dropping.

    ``chain`` lists each new bound; the last entry is the fixpoint, and
    ``steps`` holds one extra state showing that a further step gives no
    decrease.
    """
    N = initial_n_bound() if start is None else start
    chain: list[int] = []
    steps: list[ReductionState] = []
    current = N
    while True:
        st = _phase1_step(current, rule, delta)
        steps.append(st)
        if st.new_bound >= current:
            break
        chain.append(st.new_bound)
        current = st.new_bound
    return Phase1Result(start=N, chain=chain, steps=steps)


# -- phases 2 and 3 ---------------------------------------------------------


def lambda_logs(us: UnitSystem, roots: RootTriple, j: int, k: int, l: int) -> tuple[Ball, Ball, Ball]:
    """log|eps_l/eps_k|, log|delta_l/delta_k| and log|(a_j - a_k)/(a_j - a_l)|."""
    a = (roots.r1, roots.r2, roots.r3)
    l1 = us.log_eps[l - 1] - us.log_eps[k - 1]
    l2 = us.log_delta[l - 1] - us.log_delta[k - 1]
    l3 = abs(a[j - 1] - a[k - 1]).log() - abs(a[j - 1] - a[l - 1]).log()
    return l1, l2, l3


@dataclass(frozen=True)
class CaseResult:
    j: int
    k: int
    l: int
    n_step: ReductionState
    eliminated: bool
    b_steps: tuple[ReductionState, ...] = ()
    b_bound: Optional[int] = None


@dataclass(frozen=True)
class PerNResult:
    n: int
    prec: int
    cases: tuple[CaseResult, ...]

    @property
    def eliminated(self) -> bool:
        return all(cs.eliminated for cs in self.cases)

    @property
    def n_bound(self) -> int:
        return max(cs.n_step.new_bound for cs in self.cases)

    @property
    def b_bound(self) -> Optional[int]:
        vals = [cs.b_bound for cs in self.cases]
        return None if any(v is None for v in vals) else max(vals)


@dataclass
class PhaseResult:
    n_lo: int
    n_hi: int
    per_n: list[PerNResult] = field(default_factory=list)

    @property
    def threshold(self) -> int:
        """Largest n in range that survives, or n_lo - 1 when all are eliminated."""
        alive = [r.n for r in self.per_n if not r.eliminated]
        return max(alive) if alive else self.n_lo - 1

    def eliminated(self) -> list[int]:
        return [r.n for r in self.per_n if r.eliminated]


def _b_chain(
    us: UnitSystem, logs, k: int, l: int, X0: int, prec: int, rule: str, delta: Fraction
) -> tuple[list[ReductionState], int]:
    """Shrink the bound on max(|b1|, |b2|) for one fixed n.

    With m the certified norm of the inverse log matrix, any non-trivial
    solution has |Lambda| <= 16 alpha^8 e^3 exp(-(3/m) B) where
    B = max(|b1|, |b2|), so the reduction step applies with B in place of n.
    """
    k_ = constants(prec)
    m = us.inverse_norm(k, l)
    c3 = Ball(3, 0, prec) / Ball(m.hi, 0, prec)
    c2 = 16 * k_.alpha**8 * Ball(3, 0, prec).exp()
    steps: list[ReductionState] = []
    X = X0
    while True:
        try:
            st = reduce_with_retry(lambda c: _lambda_step(c, c2, c3, X, logs, rule, delta), max(X, 2) ** 3)
        except ConditionFailedError:
            break
        steps.append(st)
        if st.new_bound >= X:
            break
        X = max(st.new_bound, 0)
        if X == 0:
            break
    return steps, X


def _lambda_step(c, c2, c3, X, logs, rule, delta) -> ReductionState:
    if rule == "inhomogeneous":
        return smart_reduce_inhomogeneous(c, c2, c3, (X, X), logs, delta=delta, exclude=TRIVIAL_EXPONENTS)
    return smart_reduce(c, c2, c3, (X, X, 1), logs, rule=rule, delta=delta)


def _lambda_n(
    n: int,
    c2_of,
    c3_of,
    rule: str,
    delta: Fraction,
    want_b: bool,
    prec: Optional[int] = None,
) -> PerNResult:
    inst = ThueInstance(n)

    def attempt(p: int) -> PerNResult:
        roots = approx_roots(inst, p)
        us = build_units(inst, roots)
        X = math.floor(c_b(n, p).hi)
        c2, c3 = c2_of(p), c3_of(p)
        cases = []
        for j, k, l in CASES:
            logs = lambda_logs(us, roots, j, k, l)
            st = reduce_with_retry(lambda c: _lambda_step(c, c2, c3, X, logs, rule, delta), X**3)
            b_steps: tuple[ReductionState, ...] = ()
            b_bound = None
            if want_b:
                chain, b_bound = _b_chain(us, logs, k, l, X, p, rule, delta)
                b_steps = tuple(chain)
            cases.append(CaseResult(j, k, l, st, st.new_bound < n, b_steps, b_bound))
        return PerNResult(n=n, prec=p, cases=tuple(cases))

    return escalate(attempt, prec or working_prec(n))


def _run_range(ns: Iterable[int], fn, jobs: int = 1) -> list[PerNResult]:
    ns = list(ns)
    if jobs <= 1 or len(ns) < 2:
        return [fn(n) for n in ns]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, ns))


class _PhaseTask:
    """Picklable per-n task for the worker pool."""

    def __init__(self, phase: int, rule: str, delta: Fraction, b_upto: int, min_prec: int = 0):
        self.phase, self.rule, self.delta, self.b_upto = phase, rule, delta, b_upto
        self.min_prec = min_prec

    def __call__(self, n: int) -> PerNResult:
        if self.phase == 2:
            c2_of = lambda p: 2 * constants(p).alpha ** 8
            c3_of = lambda p: 3 * constants(p).log_alpha
        else:
            c2_of = lambda p: 16 * constants(p).alpha ** 8
            c3_of = lambda p: 9 * constants(p).log_alpha
        prec = max(working_prec(n), self.min_prec)
        return _lambda_n(n, c2_of, c3_of, self.rule, self.delta, n <= self.b_upto, prec)


def exponent_box(
    n: int, rule: str = "inhomogeneous", delta: Fraction = Fraction(3, 4), min_prec: int = 0
) -> PerNResult:
    """Phase-2 data for one n together with the shrunk bound on max(|b1|, |b2|)."""
    if n < 10:
        raise ValueError("the exponent bound needs n >= 10")
    return _PhaseTask(2, rule, delta, n, min_prec)(n)


def phase2(
    n_lo: int,
    n_hi: int,
    rule: str = "inhomogeneous",
    delta: Fraction = Fraction(3, 4),
    b_bounds_upto: int = 0,
    jobs: int = 1,
    min_prec: int = 0,
) -> PhaseResult:
    """Reduce the three-term unit form for each n in [n_lo, n_hi].

    Uses |Lambda| <= 2 alpha^8 alpha^(-3n) and |b_i| <= c_b(n).  An n is
    eliminated when every case (j, k, l) yields a bound below n.  For
    n <= ``b_bounds_upto`` the exponent box is also shrunk for the solver.
    """
    if n_lo < 10 or n_hi < n_lo:
        raise ValueError("need 10 <= n_lo <= n_hi")
    res = PhaseResult(n_lo, n_hi)
    res.per_n = _run_range(range(n_lo, n_hi + 1), _PhaseTask(2, rule, delta, b_bounds_upto, min_prec), jobs)
    return res


def phase3(
    n_lo: int,
    n_hi: int,
    rule: str = "inhomogeneous",
    delta: Fraction = Fraction(3, 4),
    jobs: int = 1,
    min_prec: int = 0,
) -> PhaseResult:
    """Like :func:`phase2` with |Lambda| <= 16 alpha^8 alpha^(-9n).

    That bound needs |y| >= alpha^(2n), which :func:`convergent_check`
    establishes for each n in the range.
    """
    if n_lo < 10 or n_hi < n_lo:
        raise ValueError("need 10 <= n_lo <= n_hi")
    res = PhaseResult(n_lo, n_hi)
    res.per_n = _run_range(range(n_lo, n_hi + 1), _PhaseTask(3, rule, delta, 0, min_prec), jobs)
    return res


# -- continued fractions ----------------------------------------------------


def _rational_cf_step(num: int, den: int) -> tuple[int, int, int]:
    q = num // den
    return q, den, num - q * den


def continued_fraction(x: Ball, max_den: int) -> list[tuple[int, int]]:
    """All convergents p/q of the real number in ``x`` with q <= max_den.

    The expansion runs on both exact endpoints of the ball at once; a partial
    quotient is accepted only when both endpoints agree on it, so every
    returned convergent is correct for every point of the ball.
    """
    if x.lo <= 0:
        raise ValueError("x must be positive")
    lo, hi = x.lo, x.hi
    a_num, a_den = lo.numerator, lo.denominator
    b_num, b_den = hi.numerator, hi.denominator
    out: list[tuple[int, int]] = []
    # (p_prev, p) and (q_prev, q) start as (p_-2, p_-1) = (0, 1) and (q_-2, q_-1) = (1, 0)
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    # invariant: the number lies between a_num/a_den and b_num/b_den (order flips each step)
    while True:
        qa = a_num // a_den
        qb = b_num // b_den
        exact = a_num * b_den == b_num * a_den
        if qa != qb:
            smallest = min(qa, qb)
            if smallest * q + q_prev > max_den:
                return out
            raise PrecisionExhaustedError("ball too wide to certify the next partial quotient")
        a = qa
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if q > max_den:
            return out
        out.append((p, q))
        ra, rb = a_num - a * a_den, b_num - a * b_den
        if exact and ra == 0:
            return out
        if ra == 0 or rb == 0:
            # an endpoint is the convergent itself; the next digit is unbounded there
            raise PrecisionExhaustedError("ball reaches a rational endpoint")
        a_num, a_den, b_num, b_den = a_den, ra, b_den, rb


def _convergent_solutions(inst: ThueInstance, root: Ball, max_den: int) -> list[tuple[int, int]]:
    found = []
    for p, q in continued_fraction(root, max_den):
        if q >= 2 and inst.form(p, q) in (1, -1):
            found.append((p, q))
    return found


def convergent_check(n: int, prec: Optional[int] = None) -> bool:
    """True when no convergent p/q (2 <= q < alpha^(2n)) of a root of f_n solves the equation."""
    if n < 3:
        raise ValueError("needs three real roots")
    return not convergent_solutions(n, prec)


def convergent_solutions(n: int, prec: Optional[int] = None) -> list[tuple[int, int]]:
    """Solutions (p, q), 2 <= q < alpha^(2n), found among the convergents of the three roots."""
    inst = ThueInstance(n)
    # q < alpha^(2n) = L_2n - alpha^(-2n) holds exactly when q <= L_2n - 1
    max_den = lucas(2 * n) - 1

    def attempt(p: int) -> list[tuple[int, int]]:
        roots = approx_roots(inst, p)
        found: list[tuple[int, int]] = []
        for r in roots:
            found.extend(_convergent_solutions(inst, r, max_den))
        return sorted(set(found))

    start = prec or max(64, 2 * max_den.bit_length() + 64)
    return escalate(attempt, start)
