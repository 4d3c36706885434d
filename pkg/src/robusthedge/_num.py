from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from numbers import Real


def to_fraction(value) -> Fraction:
    """Exact rational for ``value``.

    Floats go through their shortest round-trip decimal text (``repr``), which
    is what a JSON writer would emit, so ``0.1`` becomes ``1/10`` rather than
    its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not prices")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (str, Decimal)):
        return Fraction(value)
    if isinstance(value, Real):
        return to_fraction(float(value))
    raise TypeError(f"not a real number: {value!r}")


def is_finite_real(value) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (Fraction, int)):
        return True
    if isinstance(value, str):
        try:
            Fraction(value)
        except (ValueError, ZeroDivisionError):
            return False
        return True
    if isinstance(value, (Real, Decimal)):
        return math.isfinite(float(value))
    return False


def render(value) -> str | float:
    """JSON rendering: fractions as ``"p/q"`` strings, everything else as float."""
    if isinstance(value, Fraction):
        return str(value)
    return float(value)
