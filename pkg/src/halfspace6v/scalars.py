"""Scalar backends: exact rationals and complex floats.

All weight formulas are written as plain arithmetic expressions so they
evaluate over either backend (and, where noted, over numpy arrays for
vectorised quadrature).  This module holds parsing/formatting helpers and
the random rational point generator used by the identity-testing suites.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import DivisionByZero

RATIONAL = "rational"
COMPLEX = "complex"


def is_exact(value) -> bool:
    return isinstance(value, (Fraction, int))


def parse_scalar(obj, backend: str = RATIONAL):
    """Parse one scalar from its JSON encoding.

    Rationals are written as "p/q" strings (or bare integers); complex
    floats as a number or an [re, im] pair.
    """
    if backend == RATIONAL:
        if isinstance(obj, str):
            return Fraction(obj)
        if isinstance(obj, int):
            return Fraction(obj)
        raise ValueError(
            f"rational backend expects 'p/q' strings or integers, got {obj!r}"
        )
    if isinstance(obj, str):
        return complex(Fraction(obj))
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(obj[0], obj[1])
    raise ValueError(f"complex backend cannot parse {obj!r}")


def format_scalar(value) -> dict:
    """JSON encoding of a result scalar: {num, den} or {re, im}."""
    if isinstance(value, int):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return {"num": str(value.numerator), "den": str(value.denominator)}
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def scalar_str(value) -> str:
    if isinstance(value, (Fraction, int)):
        return str(Fraction(value))
    value = complex(value)
    return f"{value.real!r}{value.imag:+}j"


def as_float(value) -> float:
    """Real float view of a scalar (imaginary parts must be negligible)."""
    if isinstance(value, (Fraction, int)):
        return float(value)
    value = complex(value)
    return value.real


def checked_div(num, den, context: str = ""):
    """Division that raises DivisionByZero on an exact zero denominator."""
    if den == 0:
        raise DivisionByZero(context or "denominator vanished")
    return num / den


def rand_rational(rng: random.Random, bound: int = 97) -> Fraction:
    """Random rational with small numerator/denominator (|p|, q <= bound)."""
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return Fraction(num, den)


def rand_rational_nonzero(rng: random.Random, bound: int = 97) -> Fraction:
    while True:
        v = rand_rational(rng, bound)
        if v != 0:
            return v
