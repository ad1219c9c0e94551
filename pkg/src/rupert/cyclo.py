"""Exact arithmetic in the cyclotomic field Q(zeta_60).

The field has degree 16 and contains cos(2 pi k/15), sin(2 pi k/15) and the
imaginary unit ``i = zeta^15``, so every coordinate of a C30-orbit vertex
with rational generator is an element.  Elements are stored as their
coefficient vector modulo the 60th cyclotomic polynomial
``x^16 + x^14 - x^10 - x^8 - x^6 + x^2 + 1``; that representative is unique,
which makes equality an exact coefficient comparison.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
from gmpy2 import mpq

DEGREE = 16
ORDER = 60
# coefficients of Phi_60 from x^0 up to x^16
PHI60 = (1, 0, 1, 0, 0, 0, -1, 0, -1, 0, -1, 0, 0, 0, 1, 0, 1)


def _reduction_table(top: int):
    """Rows giving x^m mod Phi_60 as integer vectors, for 0 <= m <= top."""
    rows = []
    for m in range(top + 1):
        if m < DEGREE:
            v = [0] * DEGREE
            v[m] = 1
        else:
            # x^m = x * x^(m-1); shift and fold x^16 back in
            prev = rows[m - 1]
            v = [0] + prev[:-1]
            lead = prev[-1]
            if lead:
                for j in range(DEGREE):
                    v[j] -= lead * PHI60[j]
        rows.append(v)
    return rows


_RED = _reduction_table(2 * DEGREE - 2)
_RED60 = _reduction_table(ORDER - 1)
_ZERO = (mpq(0),) * DEGREE


class CycloReal:
    """An element of Q(zeta_60) (callers only build real ones)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = tuple(mpq(x) for x in coeffs)
        if len(c) != DEGREE:
            raise ValueError("expected 16 coefficients")
        self.c = c

    @classmethod
    def rational(cls, q):
        return cls((mpq(q),) + _ZERO[1:])

    @classmethod
    def zeta_power(cls, m: int, scale=1):
        v = _RED60[m % ORDER]
        s = mpq(scale)
        return cls([s * x for x in v])

    def __add__(self, other):
        other = _coerce(other)
        return CycloReal([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return CycloReal([-a for a in self.c])

    def __sub__(self, other):
        other = _coerce(other)
        return CycloReal([a - b for a, b in zip(self.c, other.c)])

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, CycloReal):
            s = mpq(other)
            return CycloReal([a * s for a in self.c])
        raw = [mpq(0)] * (2 * DEGREE - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        raw[i + j] += a * b
        out = list(raw[:DEGREE])
        for m in range(DEGREE, 2 * DEGREE - 1):
            t = raw[m]
            if t:
                row = _RED[m]
                for j in range(DEGREE):
                    if row[j]:
                        out[j] += t * row[j]
        return CycloReal(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CycloReal):
            try:
                other = _coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def evaluate(self, dps: int = 50):
        """Numerical value (real part) with ``dps`` decimal digits."""
        with mpmath.workdps(dps + 10):
            z = mpmath.exp(2j * mpmath.pi / ORDER)
            acc = mpmath.mpc(0)
            for k, a in enumerate(self.c):
                if a:
                    acc += mpmath.mpf(int(a.numerator)) / int(a.denominator) * z**k
            return +acc.real

    def __float__(self):
        return float(self.evaluate(30))

    def __repr__(self):
        return f"CycloReal({[str(x) for x in self.c]})"


def _coerce(x) -> CycloReal:
    if isinstance(x, CycloReal):
        return x
    return CycloReal.rational(x)


@lru_cache(maxsize=None)
def cos_2pi_k15(k: int) -> CycloReal:
    """cos(2 pi k/15) = (zeta^(4k) + zeta^(-4k))/2."""
    return CycloReal.zeta_power(4 * k, mpq(1, 2)) + CycloReal.zeta_power(-4 * k, mpq(1, 2))


@lru_cache(maxsize=None)
def sin_2pi_k15(k: int) -> CycloReal:
    """sin(2 pi k/15) = (zeta^(4k) - zeta^(-4k))/(2i), with 1/i = zeta^45."""
    return CycloReal.zeta_power(4 * k + 45, mpq(1, 2)) - CycloReal.zeta_power(45 - 4 * k, mpq(1, 2))


def rotz_exact(k: int, point):
    """R_z(2 pi k/15) applied to a rational point, as CycloReal coordinates."""
    x, y, z = (mpq(t) for t in point)
    c, s = cos_2pi_k15(k % 15), sin_2pi_k15(k % 15)
    return (c * x - s * y, s * x + c * y, CycloReal.rational(z))


def cyclo_dot(u, v) -> CycloReal:
    acc = CycloReal.rational(0)
    for a, b in zip(u, v):
        acc = acc + _coerce(a) * _coerce(b)
    return acc


def cyclo_det3(cols) -> CycloReal:
    """Determinant of the 3x3 matrix with the given columns."""
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = [[_coerce(t) for t in col] for col in cols]
    return a1 * (b2 * c3 - b3 * c2) - b1 * (a2 * c3 - a3 * c2) + c1 * (a2 * b3 - a3 * b2)


def cyclo_from_vertex(generators, i: int, k: int, l: int):
    """Exact coordinates of ``(-1)^l R_z(2 pi k/15) C_(i+1)``."""
    v = rotz_exact(k, generators[i])
    return tuple(-t for t in v) if l % 2 else v
