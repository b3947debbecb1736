"""Exact-when-possible scalar helpers shared by the real-coordinate code."""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from numbers import Real

TOL = 1e-9


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def exact(x):
    """Coerce ints to ``Fraction``; leave floats alone."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return x


def half(x):
    if is_exact(x):
        return Fraction(x) / 2
    return x / 2


def simplify(x):
    """Integral fractions become ints so that keys and output stay tidy."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def parse_number(text: str):
    """Parse ``text`` as an exact rational where possible.

    Decimal literals such as ``0.1`` become ``Fraction(1, 10)``; ``inf``,
    ``nan`` and exponent forms that ``Fraction`` rejects fall back to float.
    """
    t = text.strip()
    if t.lower() in {"inf", "+inf", "infinity"}:
        return math.inf
    try:
        return simplify(Fraction(t))
    except (ValueError, ZeroDivisionError):
        return float(t)


def fmt(x) -> str:
    """Deterministic text rendering of a coordinate or cost."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        d = x.denominator
        while d % 2 == 0:
            d //= 2
        while d % 5 == 0:
            d //= 5
        if d == 1:
            with localcontext() as ctx:
                ctx.prec = 60
                return format(Decimal(x.numerator) / Decimal(x.denominator), "f")
        return repr(float(x))
    if isinstance(x, Real):
        f = float(x)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if f.is_integer() and abs(f) < 2**53:
            return str(int(f))
        return repr(f)
    raise TypeError(f"cannot format {x!r}")


def close(x, y, tol: float = TOL) -> bool:
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(float(x) - float(y)) <= tol
