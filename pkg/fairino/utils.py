"""Utility functions for fairino: exact arithmetic helpers."""

import math
from fractions import Fraction
from functools import reduce
from typing import Union


def parse_alpha(value: Union[str, int, Fraction]) -> Fraction:
    """Parse an approximation factor given as ``"p/q"``, an integer or a Fraction.

    :param value: The factor to parse.
    :return: The factor as an exact Fraction in ``(0, 1]``.
    :raises ValueError: If the value is malformed or out of range.
    """
    try:
        alpha = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ValueError(f"Invalid alpha value: {value!r}. Use a fraction like `3/4`.") from exc
    if not 0 < alpha <= 1:
        raise ValueError(f"Invalid alpha value: {value!r}. It should lie in (0, 1].")
    return alpha


def ceil_div(numerator: int, denominator: int) -> int:
    """Integer ceiling of ``numerator / denominator`` for a positive denominator."""
    return -(-numerator // denominator)


def at_least_fraction(value: int, alpha: Fraction, target: int) -> bool:
    """Whether ``value >= alpha * target``, compared by cross-multiplication.

    :param value: The value obtained.
    :param alpha: The approximation factor.
    :param target: The reference value.
    """
    return value * alpha.denominator >= alpha.numerator * target


def alpha_quota(alpha: Fraction, mu: int) -> int:
    """The least integer value that is at least ``alpha * mu``."""
    return ceil_div(alpha.numerator * mu, alpha.denominator)


def harmonic(n: int) -> Fraction:
    """The ``n``-th harmonic number as an exact Fraction."""
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def lcm_range(n: int) -> int:
    """Least common multiple of ``1..n`` (1 for ``n < 1``)."""
    return reduce(lambda a, b: a * b // math.gcd(a, b), range(1, n + 1), 1)

