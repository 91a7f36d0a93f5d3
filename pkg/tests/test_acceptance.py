"""Acceptance criteria 1-10, each at its stated tolerance.

A summary line per criterion is printed at the end of the run.
"""

import random
import time

import pytest

from fibthue.bounds import baker_constant, initial_n_bound
from fibthue.lattice import IntLattice, det, is_lll_reduced, lll
from fibthue.pipeline import Config, run_all, verify_certificate
from fibthue.realball import constants
from fibthue.reduction import CASES, convergent_check
from fibthue.roots import approx_roots, certify_root_windows, certify_log_expansions, working_prec
from fibthue.sequences import ThueInstance
from fibthue.solver import brute_force_solutions, solve
from fibthue.units import build_units

from lattice_oracle import norm2, shortest

QUOTED_BOUND = 1.144e15


def pm(*pairs):
    return set(pairs) | {(-x, -y) for x, y in pairs}


@pytest.fixture(scope="module")
def proof():
    t = time.time()
    cert = run_all(Config())
    return cert, time.time() - t


def test_criterion_01_baker_constant(report):
    c = float(baker_constant().mid)
    assert report(1, 1.25e13 <= c <= 1.26e13, f"C = {c:.6e}, want [1.25e13, 1.26e13]")


def test_criterion_02_initial_bound(report):
    t = time.time()
    N0 = initial_n_bound()
    dt = time.time() - t
    ok = N0 <= 1.2e15 and abs(N0 / QUOTED_BOUND - 1) <= 0.05 and dt < 1
    assert report(2, ok, f"N0 = {N0} ({N0 / QUOTED_BOUND:.3f} x 1.144e15) in {dt:.2f}s, want <= 1.2e15 and within 5%")


def test_criterion_03_phase1_chain(report, proof):
    cert, _ = proof
    chain = cert.phase1_chain
    ok = bool(chain) and chain[0] <= 700 and chain[-1] <= 400
    assert report(3, ok, f"chain {chain}, want first <= 700 and fixpoint <= 400")


def test_criterion_04_phase2(report, proof):
    cert, _ = proof
    p2 = cert.phase2
    top = cert.phase1_bound
    kept = [r.n for r in p2.per_n if 133 <= r.n <= top and not r.eliminated]
    ok = not kept and p2.threshold <= 150 and (p2.n_lo, p2.n_hi) == (10, top)
    assert report(4, ok, f"threshold {p2.threshold} on [10, {top}], survivors in [133, {top}]: {kept}")


def test_criterion_05_convergent_check(report):
    failed = [n for n in range(49, 133) if not convergent_check(n)]
    assert report(5, not failed, f"convergent_check false for {failed or 'no n'} in [49, 132]")


def test_criterion_06_phase3(report, proof):
    cert, _ = proof
    t3 = cert.phase3_threshold
    assert report(6, t3 <= 48, f"threshold {t3} on {cert.phase3.n_lo}..{cert.phase3.n_hi}, want <= 48")


def test_criterion_07_solution_sets(report):
    t = time.time()
    bad = []
    for n in range(1, 49):
        inst = ThueInstance(n)
        want = pm((1, 0), (0, 1), (inst.fib, 1), (inst.luc, 1))
        if n == 1:
            want |= pm((2, 1), (7, 4))
        if n == 3:
            want |= pm((7, 4), (38, 273))
        if solve(inst, 20).pairs() != want:
            bad.append(n)
    dt = time.time() - t
    assert report(7, not bad and dt < 60, f"mismatches at {bad or 'no n'} for 1 <= n <= 48, {dt:.1f}s")


def test_criterion_08_oracle_equivalence(report):
    t = time.time()
    bad = [n for n in range(1, 13) if solve(ThueInstance(n), 20).pairs() != brute_force_solutions(ThueInstance(n), 1000).pairs()]
    dt = time.time() - t
    assert report(8, not bad and dt < 300, f"mismatches at {bad or 'no n'} for 1 <= n <= 12, {dt:.1f}s")


def test_criterion_09_root_and_unit_estimates(report):
    failures = []
    for n in range(10, 347):
        inst = ThueInstance(n)
        p = working_prec(n)
        roots = approx_roots(inst, p)
        us = build_units(inst, roots)
        checks = {
            "roots": certify_root_windows(inst, roots).passed,
            "logs": certify_log_expansions(inst, roots).passed,
            "regulator": us.regulator_window(),
            "inverse": all(us.inverse_norm(k, l) * n < 7 for _, k, l in CASES),
        }
        failures += [(n, name) for name, ok in checks.items() if not ok]
    assert report(9, not failures, f"{len(failures)} failures over 10 <= n <= 346 {failures[:5]}")


def test_criterion_10_lll(report):
    rng = random.Random(20240101)
    done = bad = 0
    while done < 1000:
        rows = [[rng.randint(-50, 50) for _ in range(3)] for _ in range(3)]
        if det(rows) == 0:
            continue
        done += 1
        red = lll(rows)
        # exhaustive search on the (same) reduced lattice keeps the oracle box small
        lam = shortest(red.rows)
        first = min(norm2(r) for r in red.rows)
        ok = (
            abs(det(red.rows)) == abs(det(rows))
            and is_lll_reduced(red)
            and lam is not None
            and first <= 4 * lam
        )
        bad += not ok
    assert report(10, bad == 0, f"{bad} of {done} random bases failed")


def test_full_certificate_checks_out(proof):
    cert, dt = proof
    import json

    assert verify_certificate(json.loads(cert.dumps())) == []
    assert cert.exceptions() == [1, 3]
    assert cert.coverage()[0] == (1, 48, "solved")
