"""Exact number parsing and formatting.

All core arithmetic uses :class:`fractions.Fraction`; this module is the only
place that turns document text into numbers and back.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def parse_rational(value) -> Fraction:
    """Parse a decimal string, a ``"p/q"`` string or an integer exactly.

    Floats are rejected: they have already lost the exact value.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty number")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact number: {value!r}") from exc
    raise ValueError(f"expected a number string, got {type(value).__name__}: {value!r}")


def format_rational(x: Fraction) -> str:
    """``"p/q"`` in lowest terms, or a bare integer."""
    return str(Fraction(x))
