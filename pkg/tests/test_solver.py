import pytest
from hypothesis import given, settings, strategies as st

from fibthue.sequences import ThueInstance
from fibthue.solver import Solution, SolutionSet, brute_force_solutions, solve, trivial_solutions, verify


def pm(*pairs):
    return set(pairs) | {(-x, -y) for x, y in pairs}


def test_verify_values():
    assert verify(ThueInstance(1), 2, 1) == 1
    assert verify(ThueInstance(3), 38, 273) == -1
    assert verify(ThueInstance(5), 2, 3) is None


@pytest.mark.parametrize(
    "n, expected",
    [
        (5, pm((1, 0), (0, 1), (5, 1), (11, 1))),
        (10, pm((1, 0), (0, 1), (55, 1), (123, 1))),
        # F_1 = L_1 merges two entries, and 2 is a root of x (x - 1)^2 - 2
        (1, pm((1, 0), (0, 1), (1, 1), (2, 1))),
    ],
)
def test_trivial_solutions(n, expected):
    assert trivial_solutions(ThueInstance(n)).pairs() == expected


def test_solve_exceptional_n():
    assert solve(ThueInstance(1), 20).pairs() == pm((1, 0), (0, 1), (1, 1), (2, 1), (7, 4))
    assert solve(ThueInstance(3), 20).pairs() == pm((1, 0), (0, 1), (2, 1), (4, 1), (7, 4), (38, 273))
    assert solve(ThueInstance(10), 20).pairs() == trivial_solutions(ThueInstance(10)).pairs()


@pytest.mark.parametrize("n", range(1, 9))
def test_solve_matches_exhaustive_search(n):
    inst = ThueInstance(n)
    assert solve(inst, 20).pairs() == brute_force_solutions(inst, 300, 300).pairs()


def test_solution_set_is_sorted_and_closed():
    s = solve(ThueInstance(3), 20)
    keys = [(a.y, a.x) for a in s.solutions]
    assert keys == sorted(keys)
    assert all((-a.x, -a.y) in s.pairs() for a in s.solutions)
    assert {(a.x, a.y) for a in s.nontrivial()} == pm((7, 4), (38, 273))
    assert len(s) == 12


def test_solution_set_rejects_non_solutions():
    with pytest.raises(ValueError):
        SolutionSet.build(ThueInstance(5), [(2, 3)])
    a = trivial_solutions(ThueInstance(5))
    with pytest.raises(ValueError):
        a | trivial_solutions(ThueInstance(6))


def test_bad_box():
    with pytest.raises(ValueError):
        solve(ThueInstance(4), 0)


def test_brute_force_overflow_guard():
    with pytest.raises(OverflowError):
        brute_force_solutions(ThueInstance(60), 1000)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 80), st.integers(1, 6))
def test_solutions_verify_and_box_monotone(n, b):
    inst = ThueInstance(n)
    small, large = solve(inst, b), solve(inst, b + 3)
    assert small.pairs() <= large.pairs()
    for s in large.solutions:
        assert isinstance(s, Solution) and inst.form(s.x, s.y) == s.value
