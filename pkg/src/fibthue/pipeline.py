"""End-to-end driver: bound, three reduction phases, per-n solving, certificate.

The certificate is plain JSON.  Integers are written as decimal strings and
rationals as "num/den", so nothing is lost to 64-bit or float limits.  Ball
values appear only as short decimal summaries; :func:`verify_certificate`
never looks at them and re-checks the exact integer claims alone.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from decimal import Context
from fractions import Fraction
from typing import Any, Optional

from . import __version__
from .bounds import BOUND_PREC, initial_n_bound
from .lattice import IntLattice, closest_vector, det, shortest_vector
from .realball import Ball
from .reduction import (
    PerNResult,
    PhaseResult,
    ReductionState,
    convergent_check,
    exponent_box,
    phase1,
    phase2,
    phase3,
)
from .sequences import ThueInstance
from .solver import SolutionSet, brute_force_solutions, solve, verify

__all__ = [
    "SCHEMA_VERSION",
    "Certificate",
    "Config",
    "PipelineError",
    "expected_solutions",
    "load_certificate",
    "run_all",
    "verify_certificate",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ROUNDING = "nearest integer, ties away from zero"
SMALL_N = 10  # below this the root and unit estimates do not apply
CONVERGENT_FROM = 49
ORACLE_Y = 1000


class PipelineError(RuntimeError):
    """A phase could not certify its claim."""

    def __init__(self, phase: str, n: Optional[int], message: str):
        where = f" at n={n}" if n is not None else ""
        super().__init__(f"{phase}{where}: {message}")
        self.phase, self.n, self.message = phase, n, message


@dataclass(frozen=True)
class Config:
    precision_bits: int = BOUND_PREC
    lll_delta: Fraction = Fraction(3, 4)
    jobs: int = 1
    max_n: Optional[int] = None
    small_box: int = 20
    phase1_rule: str = "shortest"
    lambda_rule: str = "inhomogeneous"

    def __post_init__(self):
        object.__setattr__(self, "lll_delta", Fraction(self.lll_delta))
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be at least 64")
        if not Fraction(1, 4) < self.lll_delta <= 1:
            raise ValueError("lll_delta must lie in (1/4, 1]")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        if self.max_n is not None and self.max_n < 1:
            raise ValueError("max_n must be positive")
        if self.small_box < 1:
            raise ValueError("small_box must be positive")

    def as_json(self) -> dict:
        # jobs is deliberately absent: it must not change the certificate bytes
        return {
            "precision_bits": str(self.precision_bits),
            "lll_delta": _frac(self.lll_delta),
            "rounding": ROUNDING,
            "small_box": str(self.small_box),
            "phase1_rule": self.phase1_rule,
            "lambda_rule": self.lambda_rule,
            "max_n": None if self.max_n is None else str(self.max_n),
            "software_version": __version__,
        }


@dataclass
class Certificate:
    config: Config
    partial: bool
    solved: dict[int, tuple[str, int, SolutionSet]]  # n -> (provenance, box, solutions)
    initial_bound: Optional[int] = None
    phase1_steps: list[tuple[int, ReductionState]] = field(default_factory=list)
    phase1_chain: list[int] = field(default_factory=list)
    phase2: Optional[PhaseResult] = None
    convergent: dict[int, bool] = field(default_factory=dict)
    convergent_range: Optional[tuple[int, int]] = None
    phase3: Optional[PhaseResult] = None
    b_boxes: dict[int, PerNResult] = field(default_factory=dict)

    @property
    def phase1_bound(self) -> Optional[int]:
        if self.initial_bound is None:
            return None
        return self.phase1_chain[-1] if self.phase1_chain else self.initial_bound

    @property
    def phase2_threshold(self) -> Optional[int]:
        return None if self.phase2 is None else self.phase2.threshold

    @property
    def phase3_threshold(self) -> Optional[int]:
        return None if self.phase3 is None else self.phase3.threshold

    def exceptions(self) -> list[int]:
        """n whose solution set is larger than the trivial one."""
        return [n for n, (_, _, sols) in sorted(self.solved.items()) if sols.pairs() != expected_solutions(n)]

    def coverage(self) -> list[tuple[int, int, str]]:
        top = max(self.solved) if self.solved else 0
        out = [(1, top, "solved")] if top else []
        if self.partial:
            return out
        for hi, how in (
            (self.phase3_threshold, None),
            (self.phase2_threshold, "phase3"),
            (self.phase1_bound, "phase2"),
            (self.initial_bound, "phase1"),
        ):
            if how is not None and hi > top:
                out.append((top + 1, hi, how))
            top = max(top, hi)
        return out

    def to_json(self) -> dict:
        doc: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.as_json(),
            "partial": self.partial,
            "initial_bound": _int(self.initial_bound),
            "phase1_chain": [str(v) for v in self.phase1_chain],
            "phase1_steps": [dict(_state(st), n_in=str(n)) for n, st in self.phase1_steps],
            "phase2_threshold": _int(self.phase2_threshold),
            "phase2": None if self.phase2 is None else _phase(self.phase2),
            "convergent_range": None
            if self.convergent_range is None
            else {
                "lo": str(self.convergent_range[0]),
                "hi": str(self.convergent_range[1]),
                "passed": {str(n): ok for n, ok in sorted(self.convergent.items())},
            },
            "phase3_threshold": _int(self.phase3_threshold),
            "phase3": None if self.phase3 is None else _phase(self.phase3),
            "exponent_boxes": {str(n): _per_n(r) for n, r in sorted(self.b_boxes.items())},
            "solved": {
                str(n): {
                    "provenance": prov,
                    "box": str(box),
                    "solutions": [[str(s.x), str(s.y), str(s.value)] for s in sols.solutions],
                }
                for n, (prov, box, sols) in sorted(self.solved.items())
            },
            "coverage": [{"lo": str(a), "hi": str(b), "by": how} for a, b, how in self.coverage()],
            "exceptions": [str(n) for n in self.exceptions()],
        }
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1, ensure_ascii=True) + "\n"


# -- serialisation helpers --------------------------------------------------


def _int(v: Optional[int]) -> Optional[str]:
    return None if v is None else str(v)


def _frac(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


_DEC = Context(prec=20)


def _summary(b: Optional[Ball]) -> Optional[dict]:
    if b is None:
        return None
    lo, hi = b.lo, b.hi
    return {
        "lo": str(_DEC.divide(lo.numerator, lo.denominator)),
        "hi": str(_DEC.divide(hi.numerator, hi.denominator)),
    }


def _state(st: ReductionState) -> dict:
    return {
        "rule": st.rule,
        "c": str(st.c),
        "c2": _summary(st.c2),
        "c3": _summary(st.c3),
        "coeff_bounds": [str(v) for v in st.coeff_bounds],
        "scaled_logs": [str(v) for v in st.scaled_logs],
        "basis": [[str(v) for v in row] for row in st.basis],
        "target": None if st.target is None else [str(v) for v in st.target],
        "excluded": [[str(a), str(b)] for a, b in st.excluded],
        "c4_sq": str(st.c4_sq),
        "S": str(st.S),
        "T": _frac(st.T),
        "value_hi": None if st.value is None else _frac(st.value.hi),
        "value": _summary(st.value),
        "new_bound": str(st.new_bound),
    }


def _per_n(r: PerNResult) -> dict:
    return {
        "n": str(r.n),
        "prec": str(r.prec),
        "eliminated": r.eliminated,
        "b_bound": _int(r.b_bound),
        "cases": [
            {
                "jkl": [cs.j, cs.k, cs.l],
                "step": _state(cs.n_step),
                "eliminated": cs.eliminated,
                "b_steps": [_state(s) for s in cs.b_steps],
                "b_bound": _int(cs.b_bound),
            }
            for cs in r.cases
        ],
    }


def _phase(res: PhaseResult) -> dict:
    return {
        "n_lo": str(res.n_lo),
        "n_hi": str(res.n_hi),
        "threshold": str(res.threshold),
        "per_n": [_per_n(r) for r in res.per_n],
    }


# -- driver -----------------------------------------------------------------


def expected_solutions(n: int) -> set[tuple[int, int]]:
    """The pairs +-(1,0), +-(0,1), +-(F_n,1), +-(L_n,1)."""
    inst = ThueInstance(n)
    base = {(1, 0), (0, 1), (inst.fib, 1), (inst.luc, 1)}
    return base | {(-x, -y) for x, y in base}


def _solve_small(n: int, box: int) -> tuple[str, int, SolutionSet]:
    inst = ThueInstance(n)
    sols = solve(inst, box)
    oracle = brute_force_solutions(inst, ORACLE_Y, ORACLE_Y)
    if sols.pairs() != oracle.pairs():
        raise PipelineError("solve", n, "unit enumeration disagrees with exhaustive search")
    return "oracle-verified", box, sols


def _solve_reduced(n: int, per_n: PerNResult) -> tuple[str, int, SolutionSet]:
    b = per_n.b_bound
    if b is None:
        raise PipelineError("solve", n, "no certified exponent bound")
    box = max(1, b)
    return "reduction-certified", box, solve(ThueInstance(n), box)


def _box_for(n: int, cfg: Config, have: dict[int, PerNResult]) -> PerNResult:
    r = have.get(n)
    if r is None or r.b_bound is None:
        r = exponent_box(n, cfg.lambda_rule, cfg.lll_delta, cfg.precision_bits)
    return r


def _guard(phase: str, n: Optional[int], fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except PipelineError:
        raise
    except (ArithmeticError, ValueError) as exc:
        raise PipelineError(phase, n, str(exc)) from exc


def _solve_range(cert: Certificate, cfg: Config, top: int, boxes: dict[int, PerNResult]) -> None:
    for n in range(1, top + 1):
        if n < SMALL_N:
            cert.solved[n] = _guard("solve", n, _solve_small, n, cfg.small_box)
        else:
            r = _guard("exponent bound", n, _box_for, n, cfg, boxes)
            cert.b_boxes[n] = r
            cert.solved[n] = _guard("solve", n, _solve_reduced, n, r)


def run_all(cfg: Config = Config()) -> Certificate:
    """Run every stage and return the certificate; raises PipelineError on any gap."""
    if cfg.max_n is not None:
        cert = Certificate(cfg, partial=True, solved={})
        _solve_range(cert, cfg, cfg.max_n, {})
        return cert

    cert = Certificate(cfg, partial=False, solved={})
    N0 = _guard("initial bound", None, initial_n_bound, prec=cfg.precision_bits)
    cert.initial_bound = N0
    log.info("initial bound %d", N0)

    p1 = _guard("phase1", None, phase1, N0, cfg.phase1_rule, cfg.lll_delta)
    cert.phase1_chain = list(p1.chain)
    ns = [N0] + list(p1.chain)
    cert.phase1_steps = list(zip(ns, p1.steps))
    N1 = cert.phase1_bound
    log.info("phase 1 chain %s", p1.chain)

    p2 = _guard(
        "phase2", None, phase2, SMALL_N, N1, cfg.lambda_rule, cfg.lll_delta,
        b_bounds_upto=CONVERGENT_FROM - 1, jobs=cfg.jobs, min_prec=cfg.precision_bits,
    )
    cert.phase2 = p2
    T2 = p2.threshold
    log.info("phase 2 threshold %d", T2)

    if T2 >= CONVERGENT_FROM:
        cert.convergent_range = (CONVERGENT_FROM, T2)
        for n in range(CONVERGENT_FROM, T2 + 1):
            cert.convergent[n] = _guard("convergent", n, convergent_check, n)
            if not cert.convergent[n]:
                raise PipelineError("convergent", n, "a convergent solves the equation")
        p3 = _guard(
            "phase3", None, phase3, CONVERGENT_FROM, T2, cfg.lambda_rule, cfg.lll_delta,
            jobs=cfg.jobs, min_prec=cfg.precision_bits,
        )
    else:
        p3 = PhaseResult(T2 + 1, T2)
    cert.phase3 = p3
    T3 = p3.threshold
    log.info("phase 3 threshold %d", T3)

    boxes = {r.n: r for r in p2.per_n}
    _solve_range(cert, cfg, T3, boxes)
    return cert


# -- verification -----------------------------------------------------------


def load_certificate(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("not a certificate of a supported schema version")
    return doc


def _q(s: str) -> Fraction:
    a, b = s.split("/")
    return Fraction(int(a), int(b))


def _check_step(st: dict, where: str, errors: list[str]) -> None:
    """Re-derive the lattice minimum and the step's inequality in exact integers."""
    rule = st["rule"]
    X = [int(v) for v in st["coeff_bounds"]]
    A = [int(v) for v in st["scaled_logs"]]
    basis = [[int(v) for v in row] for row in st["basis"]]
    c4_sq, S, T = int(st["c4_sq"]), int(st["S"]), _q(st["T"])
    new = int(st["new_bound"])
    if rule not in ("shortest", "inhomogeneous"):
        errors.append(f"{where}: rule {rule!r} does not certify a bound")
        return
    if rule == "shortest":
        ok_S = S == X[0] ** 2 + X[1] ** 2
        covol = abs(A[2])
        member = all((r[2] - r[0] * A[0] - r[1] * A[1]) % A[2] == 0 for r in basis)
    else:
        ok_S = S == X[0] ** 2
        covol = abs(A[1])
        member = all((r[1] - r[0] * A[0]) % A[1] == 0 for r in basis)
    if not ok_S or T != Fraction(1 + sum(X), 2):
        errors.append(f"{where}: S or T inconsistent with the coefficient bounds")
    if covol == 0 or not member or abs(det(basis)) != covol:
        errors.append(f"{where}: stored basis does not span the lattice of the scaled logs")
        return
    lat = IntLattice(tuple(map(tuple, basis)))
    if rule == "shortest":
        _, m = shortest_vector(lat)
    else:
        target = [int(v) for v in st["target"]]
        if target != [0, -A[2]]:
            errors.append(f"{where}: wrong target")
            return
        excluded = {(int(a), int(b)) for a, b in st["excluded"]}

        def skip(w) -> bool:
            b2, rem = divmod(w[1] - w[0] * A[0], A[1])
            return rem == 0 and (w[0], b2) in excluded

        _, m = closest_vector(lat, target, skip if excluded else None)
    if m != c4_sq:
        errors.append(f"{where}: lattice minimum is {m}, certificate says {c4_sq}")
    if not c4_sq > T * T + S:
        errors.append(f"{where}: c4^2 does not exceed T^2 + S")
    if st["value_hi"] is None or math.floor(_q(st["value_hi"])) != new:
        errors.append(f"{where}: new bound is not the floor of the stored upper value")


def _check_phase(doc: dict, name: str, lo: int, hi: int, errors: list[str]) -> Optional[int]:
    ph = doc.get(name)
    if ph is None:
        errors.append(f"{name}: missing")
        return None
    ns = [int(r["n"]) for r in ph["per_n"]]
    if ns != list(range(lo, hi + 1)):
        errors.append(f"{name}: does not cover [{lo}, {hi}]")
    alive = []
    for r in ph["per_n"]:
        n = int(r["n"])
        elim = True
        for cs in r["cases"]:
            _check_step(cs["step"], f"{name} n={n} case {cs['jkl']}", errors)
            e = int(cs["step"]["new_bound"]) < n
            if e != cs["eliminated"]:
                errors.append(f"{name} n={n}: elimination flag disagrees with its bound")
            elim = elim and e
        if len(r["cases"]) != 3:
            errors.append(f"{name} n={n}: expected three cases")
        if elim != r["eliminated"]:
            errors.append(f"{name} n={n}: per-n elimination flag wrong")
        if not elim:
            alive.append(n)
    threshold = max(alive) if alive else lo - 1
    if str(threshold) != ph["threshold"]:
        errors.append(f"{name}: threshold should be {threshold}")
    return threshold


def _check_b_box(r: dict, box: int, errors: list[str]) -> None:
    n = int(r["n"])
    bounds = []
    for cs in r["cases"]:
        steps = cs["b_steps"]
        for i, st in enumerate(steps):
            _check_step(st, f"exponent box n={n} case {cs['jkl']} step {i}", errors)
        # each step must start from the previous bound
        for a, b in zip(steps, steps[1:]):
            if int(b["coeff_bounds"][0]) != max(int(a["new_bound"]), 0):
                errors.append(f"exponent box n={n}: chain is not contiguous")
        if cs["b_bound"] is None:
            errors.append(f"exponent box n={n}: no bound")
            continue
        bounds.append(int(cs["b_bound"]))
    if bounds and max(1, max(bounds)) > box:
        errors.append(f"solve n={n}: box {box} smaller than the certified exponent bound")


def verify_certificate(doc: dict) -> list[str]:
    """Exact re-check of a certificate document; returns a list of problems (empty if sound)."""
    errors: list[str] = []
    solved = {int(k): v for k, v in doc["solved"].items()}
    boxes = doc.get("exponent_boxes", {})

    # solution sets
    for n, entry in sorted(solved.items()):
        inst = ThueInstance(n)
        pairs = set()
        for x, y, v in entry["solutions"]:
            x, y, v = int(x), int(y), int(v)
            if verify(inst, x, y) != v:
                errors.append(f"solve n={n}: ({x}, {y}) is not a solution")
            pairs.add((x, y))
        if any((-x, -y) not in pairs for x, y in pairs):
            errors.append(f"solve n={n}: not closed under negation")
        if not expected_solutions(n) <= pairs:
            errors.append(f"solve n={n}: a trivial solution is missing")
        prov, box = entry["provenance"], int(entry["box"])
        if n < SMALL_N:
            if prov != "oracle-verified":
                errors.append(f"solve n={n}: provenance should be oracle-verified")
        elif prov != "reduction-certified":
            errors.append(f"solve n={n}: provenance should be reduction-certified")
        elif str(n) not in boxes:
            errors.append(f"solve n={n}: exponent bound missing")
        else:
            _check_b_box(boxes[str(n)], box, errors)

    top = max(solved) if solved else 0
    if sorted(solved) != list(range(1, top + 1)):
        errors.append("solved n are not contiguous from 1")

    if doc["partial"]:
        return errors

    N0 = int(doc["initial_bound"])
    chain = [int(v) for v in doc["phase1_chain"]]
    steps = doc["phase1_steps"]
    ns = [N0] + chain
    if len(steps) != len(chain) + 1:
        errors.append("phase1: expected one step per link plus a closing step")
    for i, st in enumerate(steps):
        _check_step(st, f"phase1 step {i}", errors)
        if i < len(ns) and int(st["n_in"]) != ns[i]:
            errors.append(f"phase1 step {i}: starts from the wrong bound")
        if i < len(chain) and int(st["new_bound"]) != chain[i]:
            errors.append(f"phase1 step {i}: result differs from the chain")
    if any(b >= a for a, b in zip(ns, ns[1:])):
        errors.append("phase1: chain is not strictly decreasing")
    if steps and int(steps[-1]["new_bound"]) < ns[-1]:
        errors.append("phase1: chain stops before its fixpoint")
    N1 = ns[-1]

    T2 = _check_phase(doc, "phase2", SMALL_N, N1, errors)
    T3 = T2
    if T2 is not None and T2 >= CONVERGENT_FROM:
        cr = doc["convergent_range"]
        lo, hi = int(cr["lo"]), int(cr["hi"])
        if (lo, hi) != (CONVERGENT_FROM, T2):
            errors.append("convergent range does not match the phase-2 threshold")
        flags = {int(k): v for k, v in cr["passed"].items()}
        if sorted(flags) != list(range(lo, hi + 1)) or not all(flags.values()):
            errors.append("convergent check missing or failed somewhere in its range")
        T3 = _check_phase(doc, "phase3", CONVERGENT_FROM, T2, errors)
    if T2 is not None and str(T3) != doc["phase3_threshold"]:
        errors.append("phase3 threshold field is inconsistent")

    for a, b in ((N0, N1), (N1, T2), (T2, T3)):
        if a is not None and b is not None and b > a:
            errors.append("thresholds increase along the pipeline")
    if T3 is not None and top < T3:
        errors.append(f"n up to {T3} must be solved, only {top} are")

    # no gaps between 1 and the initial bound
    cov = sorted((int(c["lo"]), int(c["hi"])) for c in doc["coverage"])
    nxt = 1
    for a, b in cov:
        if a != nxt:
            errors.append(f"coverage gap before {a}")
        nxt = b + 1
    if nxt != N0 + 1:
        errors.append("coverage does not reach the initial bound")
    return errors
