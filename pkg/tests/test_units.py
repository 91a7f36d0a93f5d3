import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from fibthue.realball import constants
from fibthue.roots import approx_roots, working_prec
from fibthue.sequences import ThueInstance
from fibthue.units import CubicOrder, ExponentPair, build_units, recover_xy, solve_b_real


def _system(n, prec=None):
    inst = ThueInstance(n)
    roots = approx_roots(inst, prec or working_prec(n))
    return inst, roots, build_units(inst, roots)


@pytest.mark.parametrize("n", [10, 50])
def test_regulator_window(n):
    _, _, us = _system(n)
    assert us.regulator_window()
    la = float(constants(128).log_alpha.mid)
    assert 2 * la * la * n * n <= float(us.reg.mid) <= 2 * n * n


def test_regulator_n10_numbers():
    _, _, us = _system(10)
    assert 46.3 <= float(us.reg.mid) <= 200


def test_unit_identity_n10():
    inst, roots, us = _system(10)
    for r in roots:
        assert 1 in (r - inst.fib) * (r - inst.luc) * r


@pytest.mark.parametrize("n", [10, 30, 100, 346])
def test_inverse_norm_below_7_over_n(n):
    _, _, us = _system(n)
    for k, l in ((1, 2), (1, 3), (2, 3), (3, 1)):
        assert us.inverse_norm(k, l) * n < 7


def test_small_n_rejected():
    inst = ThueInstance(5)
    with pytest.raises(ValueError):
        build_units(inst, approx_roots(inst, 128))


@settings(max_examples=30, deadline=None)
@given(st.integers(-10, 10), st.integers(-10, 10), st.sampled_from([(1, 2), (1, 3), (2, 3)]))
def test_exponent_round_trip(b1, b2, kl):
    _, _, us = _system(15, 256)
    k, l = kl
    lbk = b1 * us.log_eps[k - 1] + b2 * us.log_delta[k - 1]
    lbl = b1 * us.log_eps[l - 1] + b2 * us.log_delta[l - 1]
    r1, r2 = solve_b_real(us, k, l, lbk, lbl)
    assert b1 in r1 and b2 in r2
    assert r1.rad < 0.5 and r2.rad < 0.5


def test_exponent_round_trip_zero():
    _, _, us = _system(10)
    z = us.log_eps[0] * 0
    r1, r2 = solve_b_real(us, 1, 2, z, z)
    assert 0 in r1 and 0 in r2
    with pytest.raises(ValueError):
        solve_b_real(us, 1, 1, z, z)


@pytest.mark.parametrize("b, expected", [((0, 0), (1, 0)), ((1, 0), (0, -1)), ((0, 1), (-55, -1))])
def test_recover_known_pairs(b, expected):
    inst, roots, _ = _system(10, 128)
    assert recover_xy(inst, roots, ExponentPair(*b), 1) == expected


def test_recover_rejects_bad_sign():
    inst, roots, _ = _system(10, 128)
    with pytest.raises(ValueError):
        recover_xy(inst, roots, ExponentPair(0, 0), 0)


def _embed(n, a):
    inst = ThueInstance(n)
    with mpmath.workdps(80):
        return [a[0] + a[1] * r + a[2] * r * r for r in mpmath.polyroots(inst.poly_coeffs, extraprec=300)]


elements = st.tuples(*[st.integers(-1000, 1000)] * 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), elements, elements)
def test_order_multiplication_matches_embeddings(n, a, b):
    order = CubicOrder(ThueInstance(n))
    prod = order.mul(a, b)
    with mpmath.workdps(80):
        for u, v, w in zip(_embed(n, a), _embed(n, b), _embed(n, prod)):
            assert abs(u * v - w) <= mpmath.mpf(10) ** -40 * (1 + abs(w))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(-15, 15), st.integers(-15, 15), st.sampled_from([1, -1]))
def test_units_have_norm_one(n, b1, b2, sign):
    order = CubicOrder(ThueInstance(n))
    u = order.unit(b1, b2, sign)
    assert order.norm(u) == sign
    assert order.mul(order.theta, order.theta_inv) == order.one
    assert order.mul(order.delta, order.delta_inv) == order.one


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(-50, 50), st.integers(-50, 50))
def test_linear_norm_is_the_form(n, x, y):
    inst = ThueInstance(n)
    order = CubicOrder(inst)
    # N(x - theta y) = F(x, y) because f_n is monic with constant -1
    assert order.norm((x, -y, 0)) == inst.form(x, y)
    assert order.as_linear((x, -y, 0)) == (x, y)
    assert order.as_linear((x, -y, 1)) is None
