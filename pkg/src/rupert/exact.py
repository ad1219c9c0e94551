"""Exact rational kernels: truncated trig series, rotation and projection
matrices, and rational square-root bounds.

All scalars are ``gmpy2.mpq`` values (always in lowest terms).  Matrices are
tuples of row tuples, vectors are tuples.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import gmpy2
from gmpy2 import mpq, mpz

KAPPA = mpq(1, 10**10)
SQRT2_UP = mpq(142, 100)
SQRT5_UP = mpq(224, 100)
TRIG_DOMAIN = 4

_SIN_DEG = 25
_COS_DEG = 24
# sin: sum_k (-1)^k x^(2k+1)/(2k+1)!, scaled by 25!
_SIN_COEF = [mpz((-1) ** k * (factorial(_SIN_DEG) // factorial(2 * k + 1))) for k in range(13)]
_COS_COEF = [mpz((-1) ** k * (factorial(_COS_DEG) // factorial(2 * k))) for k in range(13)]
_SIN_FACT = mpz(factorial(_SIN_DEG))
_COS_FACT = mpz(factorial(_COS_DEG))


class DomainError(ValueError):
    """An angle passed to a rational kernel lies outside [-4, 4]."""


def to_q(x) -> mpq:
    """Convert an int, Fraction, string or mpq to ``mpq`` exactly.

    Floats are converted exactly too (binary expansion), which is rarely what
    callers want for certificate data, but is handy in tests.
    """
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _check_domain(x: mpq):
    if not -TRIG_DOMAIN <= x <= TRIG_DOMAIN:
        raise DomainError(f"angle {float(x):.6g} outside [-4, 4]")


def _even_poly(coef, u, v):
    # sum_k coef[k] u^k v^(12-k), Horner in the homogeneous form
    acc = coef[12]
    vp = v
    for k in range(11, -1, -1):
        acc = acc * u + coef[k] * vp
        vp = vp * v
    return acc


def sinQ(x) -> mpq:
    """Taylor polynomial of sine of degree 25, evaluated exactly."""
    x = to_q(x)
    _check_domain(x)
    n, d = x.numerator, x.denominator
    u, v = n * n, d * d
    num = n * _even_poly(_SIN_COEF, u, v)
    return mpq(num, _SIN_FACT * d * v**12)


def cosQ(x) -> mpq:
    """Taylor polynomial of cosine of degree 24, evaluated exactly."""
    x = to_q(x)
    _check_domain(x)
    n, d = x.numerator, x.denominator
    u, v = n * n, d * d
    num = _even_poly(_COS_COEF, u, v)
    return mpq(num, _COS_FACT * v**12)


def sincosQ(x):
    return sinQ(x), cosQ(x)


def rotQ(alpha):
    s, c = sincosQ(alpha)
    return ((c, -s), (s, c))


def rotQ_deriv(alpha):
    s, c = sincosQ(alpha)
    return ((-s, -c), (c, -s))


def projQ(theta, phi):
    st, ct = sincosQ(theta)
    sp, cp = sincosQ(phi)
    return ((-st, ct, mpq(0)), (-ct * cp, -st * cp, sp))


def projQ_dtheta(theta, phi):
    st, ct = sincosQ(theta)
    cp = cosQ(phi)
    return ((-ct, -st, mpq(0)), (st * cp, -ct * cp, mpq(0)))


def projQ_dphi(theta, phi):
    st, ct = sincosQ(theta)
    sp, cp = sincosQ(phi)
    return ((mpq(0), mpq(0), mpq(0)), (ct * sp, st * sp, cp))


def dirQ(theta, phi):
    st, ct = sincosQ(theta)
    sp, cp = sincosQ(phi)
    return (ct * sp, st * sp, cp)


def matvec(a, v):
    return tuple(sum((aij * vj for aij, vj in zip(row, v)), mpq(0)) for row in a)


def matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), mpq(0)) for col in cols) for row in a)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), mpq(0))


def norm_sq(v):
    return sum((a * a for a in v), mpq(0))


# -- rational square roots -------------------------------------------------

_LOW = mpz(10) ** 20
_HIGH = mpz(10) ** 22
_LOG10_2 = 0.30102999566398120


def _scaled_floor(p, q, a):
    """floor(p/q * 10^(2a)) together with exact window tests."""
    if a >= 0:
        return (p * mpz(10) ** (2 * a)) // q
    return p // (q * mpz(10) ** (-2 * a))


def _window_exponent(p, q):
    # x * 10^(2a) in [10^20, 10^22)  <=>  the floor lies in [10^20, 10^22)
    est = (p.bit_length() - q.bit_length()) * _LOG10_2
    a = int((20 - est) // 2)
    while True:
        y = _scaled_floor(p, q, a)
        if y < _LOW:
            a += 1
        elif y >= _HIGH:
            a -= 1
        else:
            return a, y


def sqrt_lower(x) -> mpq:
    """Rational lower bound b/10^a of sqrt(x) with about ten correct digits."""
    x = to_q(x)
    if x < 0:
        raise ValueError("sqrt_lower of a negative number")
    if x == 0:
        return mpq(0)
    a, y = _window_exponent(x.numerator, x.denominator)
    b = gmpy2.isqrt(y)
    if a >= 0:
        return mpq(b, mpz(10) ** a)
    return mpq(b * mpz(10) ** (-a))


def sqrt_upper(x) -> mpq:
    """Rational upper bound ``1 / sqrt_lower(1/x)`` of sqrt(x)."""
    x = to_q(x)
    if x < 0:
        raise ValueError("sqrt_upper of a negative number")
    if x == 0:
        return mpq(0)
    return 1 / sqrt_lower(1 / x)


def sqrt_bounds(x):
    return sqrt_lower(x), sqrt_upper(x)


def norm_lower(v) -> mpq:
    return sqrt_lower(norm_sq(v))


def norm_upper(v) -> mpq:
    return sqrt_upper(norm_sq(v))
