import math

import mpmath
import pytest

from fibthue.bounds import (
    NoCrossingError,
    baker_constant,
    baker_wustholz_constant,
    c_b,
    c_x,
    family_heights,
    initial_n_bound,
    logy_lower_bound,
    logy_upper_bound,
    phase1_c2,
    weil_height,
)
from fibthue.realball import Ball, constants

# frozen from a run of the bisection (independently re-derived below)
INITIAL_BOUND = 3818991589278640


def test_baker_constant_value():
    c = baker_constant()
    assert 1.25e13 <= float(c.mid) <= 1.26e13
    assert 1e13 < c and c < 1.3e13


def test_baker_constant_closed_form_at_double_precision():
    with mpmath.workprec(512):
        la = mpmath.log((1 + mpmath.sqrt(5)) / 2)
        v = 17496 * mpmath.mpf(64) ** 5 * mpmath.log(12) * la * mpmath.log(mpmath.sqrt(5)) * mpmath.log(2)
        exact = mpmath.libmp.to_rational(v._mpf_)
    from fractions import Fraction

    assert Fraction(int(exact[0]), int(exact[1])) in baker_constant(256)
    assert baker_constant(256).rad < baker_constant(128).rad


def test_heights_match_weil_height():
    h = family_heights()
    # minimal polynomials of alpha, sqrt 5 and sqrt 5 - 1
    assert abs(weil_height([1, -1, -1]) - float(h[0].mid)) < 1e-12
    assert abs(weil_height([1, 0, -5]) - float(h[1].mid)) < 1e-12
    assert abs(weil_height([1, 2, -4]) - float(h[2].mid)) < 1e-12


def test_baker_wustholz_needs_matching_heights():
    with pytest.raises(ValueError):
        baker_wustholz_constant(3, 2, family_heights()[:2])


def test_lower_bound_small_n():
    v = logy_lower_bound(10)
    assert abs(math.log(float(v.mid)) + 7.30) < 0.01
    with pytest.raises(ValueError):
        logy_lower_bound(9)


def test_lower_bound_grows():
    assert logy_lower_bound(10**15) > logy_lower_bound(10**14)


def test_upper_bound_formula_n10():
    la = float(constants(128).log_alpha.mid)
    expect = math.log(3.0) * 94 + math.log(200 * math.log(200) * (200 + 19 * la + 1))
    assert abs(math.log(float(logy_upper_bound(10).mid)) - expect) < 1e-9


@pytest.mark.parametrize("a, b", [(10, 100), (1000, 10**6), (10**12, 10**16)])
def test_upper_bound_increasing(a, b):
    assert logy_upper_bound(a) < logy_upper_bound(b)


def test_upper_bound_at_large_n_matches_c2():
    # 6 U + 39 must reproduce c2 ~ 2.036e108, which puts U near 3.39e107
    v = logy_upper_bound(1144 * 10**12)
    assert v.rel_rad() < 1e-30
    assert 3.39e107 < float(v.mid) < 3.40e107


def _log_gap(n):
    # log(lower) - log(upper), evaluated independently in mpmath at 300 bits
    with mpmath.workprec(300):
        la = mpmath.log((1 + mpmath.sqrt(5)) / 2)
        C = 17496 * mpmath.mpf(64) ** 5 * mpmath.log(12) * la * mpmath.log(mpmath.sqrt(5)) * mpmath.log(2)
        lower = 2 * la / (1 + C) * n - mpmath.log(n) - 5
        N2 = 2 * mpmath.mpf(n) ** 2
        upper = mpmath.log(mpmath.mpf(3) ** 94 * N2 * mpmath.log(N2) * (N2 + (2 * n - 1) * la + 1))
        return lower - upper


def test_initial_bound_frozen_and_reproduced():
    N0 = initial_n_bound()
    assert N0 == INITIAL_BOUND
    assert _log_gap(N0) < 0 < _log_gap(N0 + 1)


def test_crossing_definition():
    N0 = initial_n_bound()
    assert logy_lower_bound(N0 + 1).log() > logy_upper_bound(N0 + 1).log()
    assert logy_lower_bound(10) < logy_upper_bound(10)


def test_crossing_is_unique_on_a_grid():
    signs = [_log_gap(int(10 ** (e / 4))) > 0 for e in range(4, 65)]
    flips = sum(a != b for a, b in zip(signs, signs[1:]))
    assert flips == 1


def test_bad_bracket():
    with pytest.raises(NoCrossingError):
        initial_n_bound(10, 1000)


def test_phase1_constants():
    n = 1144 * 10**12
    assert abs(float(phase1_c2(n).mid) / 2.036e108 - 1) < 1e-3
    assert abs(float(c_x(n).mid) / 1.425e109 - 1) < 1e-3
    # c_b(n) = 7/n (U + n log alpha + 1)
    u = logy_upper_bound(100)
    assert abs(c_b(100) - Ball(7, 0, 128) / 100 * (u + 100 * constants(128).log_alpha + 1)) <= c_b(100).rad * 4
