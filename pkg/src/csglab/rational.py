"""Exact rational values and the absorbing infinite cost.

All costs, shares and potentials in the package are ``fractions.Fraction``
values; nothing is ever evaluated in floating point. ``INFINITY`` is the
distinguished cost of an agent whose path overloads an edge: it absorbs
addition and dominates every comparison.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .errors import ParameterViolation

Rational = Fraction


class Infinity:
    """Singleton infinite cost: ``x + INFINITY == INFINITY > x`` for finite x."""

    _singleton = None
    __slots__ = ()

    def __new__(cls):
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __eq__(self, other):
        return isinstance(other, Infinity)

    def __hash__(self):
        return hash((Infinity, "inf"))

    def __lt__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return isinstance(other, Infinity)
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return not isinstance(other, Infinity)
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return True
        return NotImplemented

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinity()

Cost = Union[Fraction, Infinity]


def is_finite(value: Cost) -> bool:
    return not isinstance(value, Infinity)


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or ``"num"`` into a reduced Fraction."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterViolation(f"not a valid rational: {text!r} ({exc})") from None
    if value.denominator == 0:  # pragma: no cover - Fraction already rejects
        raise ParameterViolation(f"zero denominator: {text!r}")
    return value


def format_rational(value: Cost) -> str:
    """Serialize as ``"num/den"`` (always with an explicit denominator)."""
    if isinstance(value, Infinity):
        return "inf"
    return f"{value.numerator}/{value.denominator}"


def as_decimal(value: Cost) -> float | None:
    """Float approximation for reports; None for the infinite cost."""
    if isinstance(value, Infinity):
        return None
    return float(value)
