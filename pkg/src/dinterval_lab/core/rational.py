# src/dinterval_lab/core/rational.py

from fractions import Fraction
from math import lcm
from typing import Annotated, Iterable

from pydantic import PlainSerializer, PlainValidator


def parse_rational(value: object) -> Fraction:
    """
    Parses an exact rational from a "p/q" string, an integer string, an int or a Fraction.
    Floats are rejected: every fractional invariant in this package is exact.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"'{value}' is not an exact rational of the form 'p/q'") from e
    raise ValueError(f"expected an exact rational 'p/q', got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Serializes a rational as "p/q" (always with an explicit denominator)."""
    return f"{value.numerator}/{value.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    """Least common multiple of the denominators (1 for an empty iterable)."""
    result = 1
    for value in values:
        result = lcm(result, value.denominator)
    return result


# Exact arbitrary-precision fraction, stored in lowest terms with a positive denominator
# (guaranteed by fractions.Fraction) and serialized as a "p/q" string.
Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]
