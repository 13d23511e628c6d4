import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from protoderiv import bumps
from protoderiv.bumps import active_indices, branch, breakpoints, f, f_dd

from oracles import f_interp


def test_f_examples():
    assert f(1, 0.5) == 0.5
    assert all(f(n, 0.0) == 0.0 for n in (1, 2, 17, 1070))
    assert f(2, 0.375) == 0.25


def test_f_rejects_bad_input():
    with pytest.raises(ValueError):
        f(0, 0.5)
    with pytest.raises(ValueError):
        f(1, -0.1)
    with pytest.raises(bumps.BumpRangeError):
        f(1071, 1e-300)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 500, 1070])
def test_breakpoint_values_and_continuity(n):
    a, b, c, d = breakpoints(n)
    assert (a, b, c, d) == (2.0 ** (-n - 1), 2.0 ** -n, 2.0 ** (-n + 1), 2.0 ** (-n + 2))
    assert a < b < c < d
    assert [f(n, t) for t in (a, b, c, d)] == [0.0, b, b, 0.0]
    # adjacent formulas agree at shared breakpoints
    for t, (lo, hi) in zip((a, b, c, d), [("zero-left", "ramp-up"), ("ramp-up", "plateau"),
                                          ("plateau", "ramp-down"), ("ramp-down", "zero-right")]):
        assert bumps.BumpBranch(lo, n, (a, b, c, d)).value(t) == bumps.BumpBranch(hi, n, (a, b, c, d)).value(t)


def test_branch_kinds():
    assert branch(1, 0.1).kind == "zero-left"
    assert branch(1, 0.3).kind == "ramp-up"
    assert branch(1, 0.7).kind == "plateau"
    assert branch(1, 1.5).kind == "ramp-down"
    assert branch(1, 2.5).kind == "zero-right"
    # lower branch at a shared endpoint
    assert branch(1, 0.5).kind == "ramp-up"


def test_f_matches_interpolation_oracle():
    rng = np.random.default_rng(1)
    for n in range(1, 12):
        ts = np.concatenate([rng.uniform(0, 2.0 ** (-n + 3), 300),
                             np.arange(0, 2 ** 6 + 1) * 2.0 ** (-n - 4)])
        for t in ts:
            assert f(n, float(t)) == pytest.approx(f_interp(n, float(t)), abs=1e-16)


def test_f_exact_on_dyadic_grid():
    # on a dyadic grid interpolation is exact too, so the results must agree bitwise
    for n in (1, 4, 9):
        for j in range(0, 129):
            t = j * 2.0 ** (-n - 3)
            a = 2.0 ** (-n - 1)
            expected = f_interp(n, t)
            assert f(n, t) == expected, (n, t, a)


def test_f_dd_examples():
    assert f_dd(2, 0.1875, 1) == 2.0
    assert f_dd(1, 1.5, 1) == -0.5
    assert f_dd(1, 0.5, -1) == -2.0
    with pytest.raises(ValueError):
        f_dd(1, 0.0, 1)


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("direction", [1, -1])
def test_f_dd_matches_one_sided_quotients(n, direction):
    # includes every breakpoint, where left and right slopes differ
    ts = [j * 2.0 ** (-n - 3) for j in range(1, 40)]
    for t in ts:
        expected = f_dd(n, t, direction)
        for k in range(12, 30):
            s = 2.0 ** -k
            q = (f(n, t + s * direction) - f(n, t)) / s
            assert q == expected, (t, s)
        assert expected in (0.0, 2.0, -2.0, 0.5, -0.5)


def test_active_indices_examples():
    # strict window 2^-n-1 < t < 2^-n+2: index 2 is not active at t = 1/8
    assert active_indices(0.125) == [3, 4]
    assert active_indices(3.0) == []
    assert active_indices(0.3) == [1, 2, 3]
    assert active_indices(1.0) == [1]
    assert active_indices(1.5) == [1]
    with pytest.raises(ValueError):
        active_indices(0.0)


def _brute_window(t, n_max=1070):
    return [n for n in range(1, n_max + 1) if 2.0 ** (-n - 1) < t < 2.0 ** (-n + 2)]


def test_active_indices_brute_force():
    rng = np.random.default_rng(2)
    ts = list(2.0 ** rng.uniform(-60, 3, 2000)) + [2.0 ** -k for k in range(-3, 70)]
    for t in ts:
        t = float(t)
        got = active_indices(t)
        assert got == _brute_window(t)
        assert len(got) <= 3
        assert got == [n for n in range(1, 80) if f(n, t) != 0.0]


def test_lipschitz_two_random_pairs():
    rng = np.random.default_rng(3)
    ts = 2.0 ** rng.uniform(-20, 2, size=(100_000, 2))
    for t, s in ts.tolist():
        for n in set(active_indices(t)) | set(active_indices(s)):
            assert abs(f(n, t) - f(n, s)) <= 2 * abs(t - s)


def test_envelope_lower_bound():
    rng = np.random.default_rng(4)
    grid = [j * 2.0 ** -12 for j in range(1, 2 ** 12 + 1)]
    for t in grid + list((1.0 - rng.random(10_000)).tolist()):
        assert bumps.envelope(t) >= t / 2


@given(st.floats(min_value=1e-300, max_value=8.0), st.integers(1, 1000))
def test_support_iff_active(t, n):
    assert (f(n, t) != 0.0) == (n in active_indices(t))


@given(st.integers(1, 1070), st.integers(0, 2 ** 20))
def test_value_range(n, j):
    t = j * 2.0 ** (-n - 20 + 2)
    assert 0.0 <= f(n, t) <= 2.0 ** -n
