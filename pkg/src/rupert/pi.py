"""Rational enclosures of pi and integer rounding of pi-multiples."""

from __future__ import annotations

from gmpy2 import mpq, mpz

# pi = 3.14159265358979323846264338...
PI_LO = mpq(314159265358979323846, 10**20)
PI_HI = mpq(314159265358979323847, 10**20)


def _floor(q: mpq) -> int:
    return int(mpz(q.numerator) // mpz(q.denominator))


def floor_pi_multiple(coef, scale) -> int:
    """floor(coef * pi * scale) for rational ``coef`` and integer ``scale``.

    Raises when the enclosure is too coarse to decide (never the case for
    the constants used in this package).
    """
    coef = mpq(coef)
    a, b = coef * PI_LO * scale, coef * PI_HI * scale
    lo, hi = (a, b) if a <= b else (b, a)
    if coef == 0:
        return 0
    f = _floor(lo)
    if _floor(hi) != f:
        raise ArithmeticError("pi enclosure too coarse for this rounding")
    return f


def ceil_pi_multiple(coef, scale) -> int:
    return -floor_pi_multiple(-mpq(coef), scale)
