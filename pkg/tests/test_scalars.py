from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from walkgen.errors import NotASquareError
from walkgen.scalars import (
    GaussianRational,
    exact_abs,
    exact_sqrt,
    format_scalar,
    gauss,
    parse_scalar,
    to_exact,
    to_float,
)

fractions = st.fractions(min_value=-100, max_value=100, max_denominator=50)
gaussians = st.builds(gauss, fractions, fractions)


def test_gauss_collapses_to_fraction():
    assert isinstance(gauss(Fraction(1, 2), 0), Fraction)
    assert isinstance(gauss(1, 1), GaussianRational)


def test_i_squared_is_minus_one():
    i = gauss(0, 1)
    assert i * i == -1
    assert isinstance(i * i, Fraction)


@given(gaussians, gaussians)
def test_field_operations_match_complex(x, y):
    assert complex(to_float(x + y)) == pytest.approx(complex(to_float(x)) + complex(to_float(y)))
    assert complex(to_float(x * y)) == pytest.approx(complex(to_float(x)) * complex(to_float(y)))
    if y != 0:
        assert (x / y) * y == x


@given(gaussians)
def test_exact_sqrt_of_square_is_canonical(z):
    r = exact_sqrt(z * z)
    assert r * r == z * z
    rc = complex(to_float(r))
    assert rc.real > 0 or (rc.real == 0 and rc.imag >= 0)


def test_exact_sqrt_examples():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(-1) == gauss(0, 1)
    assert exact_sqrt(gauss(0, 2)) == gauss(1, 1)
    with pytest.raises(NotASquareError):
        exact_sqrt(2)


def test_exact_abs():
    assert exact_abs(gauss(3, 4)) == 5
    assert exact_abs(Fraction(-2, 3)) == Fraction(2, 3)


@given(gaussians)
def test_format_parse_round_trip(z):
    assert parse_scalar(format_scalar(z), exact=True) == z


def test_format_float_values():
    import numpy as np

    assert format_scalar(np.float64(0.25)) == "0.25"
    assert format_scalar(0.5 + 0j) == "0.5"
    assert parse_scalar("0.5+1j", exact=False) == 0.5 + 1j


def test_to_exact_of_binary_float():
    assert to_exact(0.5) == Fraction(1, 2)
    assert to_exact(1 + 2j) == gauss(1, 2)
