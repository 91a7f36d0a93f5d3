from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from fibthue.realball import constants
from fibthue.roots import (
    approx_roots,
    certify_root_windows,
    certify_log_expansions,
    dyadic_sign,
    working_prec,
)
from fibthue.sequences import ThueInstance


def _oracle_roots(n):
    inst = ThueInstance(n)
    with mpmath.workdps(60 + 2 * n):
        rts = mpmath.polyroots(inst.poly_coeffs, maxsteps=500, extraprec=20 * n + 200)
        rts = sorted(mpmath.re(r) for r in rts)
        return [Fraction(*map(int, mpmath.libmp.to_rational(r._mpf_))) for r in rts]


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=3, max_value=120))
def test_roots_enclose_oracle(n):
    t = approx_roots(ThueInstance(n), working_prec(n))
    small, mid, big = _oracle_roots(n)
    # r1 is near F_n, r2 near L_n, r3 near 0
    assert mid in t.r1 and big in t.r2 and small in t.r3
    assert t[1] is t.r1 and list(t) == [t.r1, t.r2, t.r3]


@pytest.mark.parametrize("n", [10, 50, 200])
def test_roots_are_tight(n):
    p = working_prec(n)
    t = approx_roots(ThueInstance(n), p)
    for r in t:
        assert r.hi - r.lo < Fraction(1, 2**p)


def test_n10_root_windows():
    inst = ThueInstance(10)
    t = approx_roots(inst, 128)
    c = constants(128)
    assert abs(float(t.r1.mid) - 55) <= float(6 * c.alpha ** -20)
    assert abs(t.r3 - c.sqrt5 * c.alpha ** -20) <= c.alpha ** -40
    assert 1 in t.r1 * t.r2 * t.r3
    assert 3.9e-4 < float(6 * c.alpha ** -20) < 4.0e-4


def test_dyadic_sign_brackets_roots():
    inst = ThueInstance(10)
    k = 40
    # f changes sign across each root
    assert dyadic_sign(inst, 55 * 2**k - 2**32, k) != dyadic_sign(inst, 55 * 2**k + 2**32, k)
    assert dyadic_sign(inst, 0, k) == -1


def test_precision_requirements():
    with pytest.raises(ValueError):
        approx_roots(ThueInstance(2))
    with pytest.raises(ValueError):
        approx_roots(ThueInstance(10), 32)
    assert working_prec(10) == 64 and working_prec(100) == 330


@pytest.mark.parametrize("n", [10, 11, 50, 100, 346])
def test_root_expansions_certify(n):
    inst = ThueInstance(n)
    t = approx_roots(inst, working_prec(n))
    r31, r32 = certify_root_windows(inst, t), certify_log_expansions(inst, t)
    assert r31.passed and set(r31.checks) == {"r1", "r2", "r3"}
    assert r32.passed and len(r32.checks) == 6


def test_expansions_refuse_small_n():
    inst = ThueInstance(3)
    t = approx_roots(inst, 128)
    with pytest.raises(ValueError):
        certify_root_windows(inst, t)
    with pytest.raises(ValueError):
        certify_log_expansions(inst, t)


def test_log_expansion_n10_values():
    inst = ThueInstance(10)
    t = approx_roots(inst, 128)
    c = constants(128)
    target = 10 * c.log_alpha - c.log_sqrt5
    bound = 3 * c.alpha ** -20
    assert abs(t.r1.log() - target) <= bound
    assert abs(abs(t.r3 - 55).log() - target) <= bound
