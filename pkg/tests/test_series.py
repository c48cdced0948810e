from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkgen.errors import NonUnitError, NotASquareError, UsageError
from walkgen.scalars import gauss
from walkgen.series import (
    EXACT,
    FLOAT,
    TruncatedSeries,
    add,
    allclose,
    divide_by_one_minus_x,
    mul,
    partial_sums,
    reciprocal,
    sqrt,
)

T = TruncatedSeries
ORDER = 12

small = st.fractions(min_value=-4, max_value=4, max_denominator=9)
nonzero = st.builds(lambda q, s: q * s, st.fractions(min_value=Fraction(1, 9), max_value=4, max_denominator=9),
                    st.sampled_from((1, -1)))
coeff_lists = st.lists(small, min_size=ORDER + 1, max_size=ORDER + 1)
series_st = coeff_lists.map(lambda cs: T(cs, EXACT))
units_st = st.builds(lambda a, rest: T([a] + rest, EXACT), nonzero,
                     st.lists(small, min_size=ORDER, max_size=ORDER))


def naive_mul(u, v):
    n = len(u)
    return [sum((u[i] * v[k - i] for i in range(k + 1)), Fraction(0)) for k in range(n)]


def test_add_examples():
    U, V = T([1, 1, 0, 0]), T([1, -1, 0, 0])
    assert add(U, V) == T([2, 0, 0, 0])
    assert add(U, V, 0, 0) == T.zero(3)
    G = T.geometric(1, 5)
    assert add(G, G, 2, -1) == G


def test_add_rejects_mismatch():
    with pytest.raises(UsageError):
        add(T.one(3), T.one(4))
    with pytest.raises(UsageError):
        add(T.one(3), T.one(3, FLOAT))


def test_mul_examples():
    assert mul(T([1, -1, 0, 0, 0]), T.geometric(1, 4)) == T.one(4)
    U = T([3, Fraction(1, 2), 7])
    assert mul(U, T.one(2)) == U
    assert mul(T([1, 1, 0, 0]), T([1, 1, 0, 0])) == T([1, 2, 1, 0])


@given(series_st, series_st)
def test_mul_matches_direct_convolution(U, V):
    assert mul(U, V).coeffs == tuple(naive_mul(U.coeffs, V.coeffs))


@given(series_st, series_st, series_st)
@settings(max_examples=40)
def test_ring_axioms(U, V, W):
    assert mul(U, V) == mul(V, U)
    assert mul(mul(U, V), W) == mul(U, mul(V, W))
    assert mul(U, add(V, W)) == add(mul(U, V), mul(U, W))
    assert add(U, -U) == T.zero(ORDER)


def test_reciprocal_examples():
    assert reciprocal(T([1, -1, 0, 0, 0, 0])) == T.geometric(1, 5)
    half = T([1, Fraction(-1, 2)] + [0] * 6)
    R = reciprocal(half)
    assert R == T.geometric(Fraction(1, 2), 7)
    assert mul(R, half) == T.one(7)
    C = T.monomial(2, 8)
    assert reciprocal(T.one(8) - C) == T([1, 0, 1, 0, 1, 0, 1, 0, 1])


def test_reciprocal_needs_unit():
    with pytest.raises(NonUnitError):
        reciprocal(T([0, 1, 1]))


@given(units_st)
def test_reciprocal_inverts(V):
    assert mul(reciprocal(V), V) == T.one(ORDER)


def test_reciprocal_complex():
    V = T([1, gauss(0, 1), Fraction(1, 3), 0, 0])
    assert mul(reciprocal(V), V) == T.one(4)


@given(st.lists(st.fractions(min_value=Fraction(-1, 8), max_value=Fraction(1, 8), max_denominator=64), min_size=ORDER, max_size=ORDER))
def test_reciprocal_bound(tail):
    c = sum(abs(x) for x in tail)
    if c >= 1:
        return
    U = reciprocal(T([1] + [-x for x in tail]))
    assert sum(abs(u) for u in U.coeffs) <= 1 / (1 - c)


def test_sqrt_examples():
    assert sqrt(T.one(5)) == T.one(5)
    S = sqrt(T([1, -1, 0, 0, 0, 0]))
    assert S.coeffs[:4] == (1, Fraction(-1, 2), Fraction(-1, 8), Fraction(-1, 16))
    assert mul(S, S) == T([1, -1, 0, 0, 0, 0])
    assert sqrt(T.monomial(2, 6))[1] == 1
    assert sqrt(T.zero(4)) == T.zero(4)


def test_sqrt_rejects_odd_lowest_term():
    with pytest.raises(NotASquareError):
        sqrt(T.monomial(3, 6))


def test_sqrt_needs_square_leading_coefficient():
    with pytest.raises(NotASquareError):
        sqrt(T([2, 1, 0]))


@given(units_st)
def test_sqrt_round_trips_squares(V):
    W = mul(V, V)
    R = sqrt(W)
    assert mul(R, R) == W
    assert R == V or R == -V


def test_sqrt_float_backend():
    V = T([1.0, -1.0] + [0.0] * 10, FLOAT)
    R = sqrt(V)
    assert allclose(mul(R, R), V)


def test_partial_sums_examples():
    assert partial_sums(T.one(4)) == T.geometric(1, 4)
    assert divide_by_one_minus_x(T([1, -1, 0, 0])) == T.one(3)
    V = T.geometric(Fraction(1, 2), 6)
    assert partial_sums(V).coeffs == tuple(2 - Fraction(1, 2 ** n) for n in range(7))


def test_float_and_exact_agree():
    U = T([Fraction(1, 3), Fraction(-2, 7), 5, Fraction(1, 11)])
    V = T([1, Fraction(1, 2), Fraction(1, 4), 0])
    assert allclose(mul(U, V).to_float(), mul(U.to_float(), V.to_float()))
    assert allclose(reciprocal(V).to_float(), reciprocal(V.to_float()))


def test_float_series_is_read_only():
    S = T([1.0, 2.0], FLOAT)
    with pytest.raises(ValueError):
        S.coeffs[0] = 5.0
    with pytest.raises(AttributeError):
        S.order = 3


def test_complex_with_zero_imag_collapses():
    S = T(np.array([1 + 0j, 2 + 0j]), FLOAT)
    assert S.is_real()
    assert S.coeffs.dtype == np.float64


def test_truncate_and_backends():
    S = T.geometric(Fraction(1, 2), 6)
    assert S.truncate(2) == T([1, Fraction(1, 2), Fraction(1, 4)])
    assert S.to_float().to_exact() == S
    assert S.to_backend(EXACT) is S or S.to_backend(EXACT) == S
