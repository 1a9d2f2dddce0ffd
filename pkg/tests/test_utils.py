"""Test the fairino.utils module."""

from fractions import Fraction

import pytest

from fairino.utils import alpha_quota, at_least_fraction, ceil_div, harmonic, lcm_range, parse_alpha


@pytest.mark.parametrize(
    "value, expected",
    [
        ("3/4", Fraction(3, 4)),
        ("1", Fraction(1)),
        (1, Fraction(1)),
        (Fraction(2, 3), Fraction(2, 3)),
        ("0.5", Fraction(1, 2)),
    ],
)
def test_parse_alpha(value, expected):
    """Test parse_alpha function."""
    assert parse_alpha(value) == expected


@pytest.mark.parametrize("invalid_value", ["0", "5/4", "-1/2", "abc", "1/0", None])
def test_parse_alpha_with_invalid_value(invalid_value):
    """Test parse_alpha function with invalid values."""
    with pytest.raises(ValueError):
        parse_alpha(invalid_value)


@pytest.mark.parametrize("numerator, denominator, expected", [(7, 2, 4), (6, 3, 2), (0, 5, 0), (1, 3, 1)])
def test_ceil_div(numerator, denominator, expected):
    """Test ceil_div function."""
    assert ceil_div(numerator, denominator) == expected


@pytest.mark.parametrize(
    "value, alpha, target, expected",
    [
        (3, Fraction(3, 4), 4, True),
        (2, Fraction(3, 4), 4, False),
        (0, Fraction(1), 0, True),
        (5, Fraction(1), 6, False),
    ],
)
def test_at_least_fraction(value, alpha, target, expected):
    """Test the exact comparison value >= alpha * target."""
    assert at_least_fraction(value, alpha, target) is expected


@pytest.mark.parametrize("alpha, mu, expected", [(Fraction(3, 4), 5, 4), (Fraction(1), 3, 3), (Fraction(1, 2), 1, 1)])
def test_alpha_quota(alpha, mu, expected):
    """Test alpha_quota function."""
    assert alpha_quota(alpha, mu) == expected


def test_harmonic_and_lcm():
    """Test the harmonic numbers and lcm(1..n)."""
    assert harmonic(1) == 1
    assert harmonic(4) == Fraction(25, 12)
    assert lcm_range(0) == 1
    assert lcm_range(4) == 12
    assert lcm_range(6) == 60
