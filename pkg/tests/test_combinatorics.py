import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqecc import combinatorics as cb
from aqecc.errors import ParityError, RangeError
from oracles import heisenberg_count, motzkin_count


@pytest.mark.parametrize("n,k,expected", [(4, 2, 6), (0, 0, 1), (4, 5, 0), (4, -1, 0)])
def test_binomial_examples(n, k, expected):
    assert int(cb.binomial(n, k)) == expected


@pytest.mark.parametrize("N,m,expected", [(4, 0, 6), (4, 4, 1), (6, 2, 15)])
def test_heisenberg_count_examples(N, m, expected):
    assert int(cb.heisenberg_sector_count(N, m)) == expected


def test_heisenberg_count_matches_enumeration():
    for N in range(1, 11):
        for m in range(-N, N + 1, 2):
            assert int(cb.heisenberg_sector_count(N, m)) == heisenberg_count(N, m)


def test_heisenberg_count_errors():
    with pytest.raises(ParityError):
        cb.heisenberg_sector_count(4, 1)
    with pytest.raises(RangeError):
        cb.heisenberg_sector_count(4, 6)


@pytest.mark.parametrize("L,i,expected", [(1, 0, 1), (4, 0, 19), (4, 2, 10)])
def test_motzkin_count_examples(L, i, expected):
    assert int(cb.motzkin_sector_count(L, i)) == expected


def test_motzkin_count_matches_enumeration():
    for L in range(1, 8):
        for i in range(-L, L + 1):
            assert int(cb.motzkin_sector_count(L, i)) == motzkin_count(L, i)


def test_motzkin_count_range_error():
    with pytest.raises(RangeError):
        cb.motzkin_sector_count(3, 4)


def test_motzkin_asymptotic_at_zero():
    for L in (5, 50, 500):
        expected = (L + 0.5) * math.log(3) - math.log(2 * math.sqrt(math.pi * L))
        assert cb.motzkin_sector_count_asymptotic(L, 0) == pytest.approx(expected, rel=1e-14)


def test_motzkin_asymptotic_accuracy_and_symmetry():
    exact = cb.motzkin_sector_count(400, 0).log_value
    approx = cb.motzkin_sector_count_asymptotic(400, 0)
    assert abs(approx - exact) / exact <= 1e-2
    assert cb.motzkin_sector_count_asymptotic(100, 10) == cb.motzkin_sector_count_asymptotic(100, -10)


def test_gaussian_binomial():
    for a in (4, 40, 400):
        expected = (a + 1) * math.log(2) - 0.5 * math.log(2 * math.pi * a)
        assert cb.gaussian_binomial_approx(a, 0) == pytest.approx(expected, rel=1e-14)
    exact = cb.binomial(400, 200).log_value
    assert abs(cb.gaussian_binomial_approx(400, 0) - exact) / exact <= 1e-2
    assert cb.gaussian_binomial_approx(50, 6) == cb.gaussian_binomial_approx(50, -6)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.data())
def test_motzkin_convolution_identity(N, data):
    d = data.draw(st.integers(1, N - 1))
    m = data.draw(st.integers(-N, N))
    total = sum(
        int(cb.motzkin_sector_count(d, r)) * int(cb.motzkin_sector_count(N - d, m - r))
        for r in range(-d, d + 1)
        if abs(m - r) <= N - d
    )
    assert total == int(cb.motzkin_sector_count(N, m))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.data())
def test_vandermonde_identity(N, data):
    d = data.draw(st.integers(1, N - 1))
    m = data.draw(st.sampled_from(range(-N, N + 1, 2)))
    total = sum(
        int(cb.binomial(d, (d + r) // 2)) * int(cb.binomial(N - d, (N - d + m - r) // 2))
        for r in range(-d, d + 1, 2)
    )
    assert total == int(cb.heisenberg_sector_count(N, m))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 200), st.data())
def test_log_value_consistency(L, data):
    i = data.draw(st.integers(-L, L))
    c = cb.motzkin_sector_count(L, i)
    assert c.exact is not None
    assert abs(math.log(c.exact) - c.log_value) <= 1e-12 * max(1.0, abs(c.log_value))


def test_log_mode_past_digit_budget():
    c = cb.binomial(5000, 2500)
    assert c.exact is None
    ref = math.lgamma(5001) - 2 * math.lgamma(2501)
    assert c.log_value == pytest.approx(ref, rel=1e-12)
    small = cb.binomial(5000, 2500, digit_budget=10**6)
    assert small.exact == math.comb(5000, 2500)
    m = cb.motzkin_sector_count(3000, 0)
    assert m.exact is None and math.isfinite(m.log_value)
    exact_log = cb.motzkin_sector_count(3000, 0, digit_budget=10**6)
    assert m.log_value == pytest.approx(math.log(exact_log.exact), rel=1e-12)
