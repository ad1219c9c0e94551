"""Floating-point rotations, projections and their derivatives.

Conventions (all angles in radians):

* ``R(a)`` rotates the plane counter-clockwise by ``a``.
* ``X(theta, phi)`` is the unit vector with spherical angles ``theta, phi``.
* ``M(theta, phi)`` is the 2x3 orthogonal projection along ``X(theta, phi)``.
"""

from __future__ import annotations

import math

import numpy as np

_AXES = ("x", "y", "z")


def rot2(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


def rot2_deriv(alpha: float) -> np.ndarray:
    """Derivative of :func:`rot2` with respect to ``alpha``."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[-s, -c], [c, -s]])


def rot3(axis: str, alpha: float) -> np.ndarray:
    """Rotation about a coordinate axis (``"x"``, ``"y"`` or ``"z"``)."""
    c, s = math.cos(alpha), math.sin(alpha)
    if axis == "x":
        return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    if axis == "y":
        return np.array([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    if axis == "z":
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    raise ValueError(f"unknown axis {axis!r}, expected one of {_AXES}")


def rot3_deriv(axis: str, alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    if axis == "x":
        return np.array([[0.0, 0.0, 0.0], [0.0, -s, -c], [0.0, c, -s]])
    if axis == "y":
        return np.array([[-s, 0.0, -c], [0.0, 0.0, 0.0], [c, 0.0, -s]])
    if axis == "z":
        return np.array([[-s, -c, 0.0], [c, -s, 0.0], [0.0, 0.0, 0.0]])
    raise ValueError(f"unknown axis {axis!r}, expected one of {_AXES}")


def direction(theta: float, phi: float) -> np.ndarray:
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array([ct * sp, st * sp, cp])


def projection(theta: float, phi: float) -> np.ndarray:
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array([[-st, ct, 0.0], [-ct * cp, -st * cp, sp]])


def projection_dtheta(theta: float, phi: float) -> np.ndarray:
    st, ct = math.sin(theta), math.cos(theta)
    cp = math.cos(phi)
    return np.array([[-ct, -st, 0.0], [st * cp, -ct * cp, 0.0]])


def projection_dphi(theta: float, phi: float) -> np.ndarray:
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array([[0.0, 0.0, 0.0], [ct * sp, st * sp, cp]])


def perp(v) -> np.ndarray:
    """``R(pi/2) v`` for a plane vector."""
    return np.array([-v[1], v[0]])


def origin_strictly_inside(a, b, c) -> bool:
    """True iff the origin lies strictly inside the triangle ``a, b, c``.

    The triangle must be positively oriented; degenerate or clockwise
    triangles give False.
    """
    def turn(u, v):
        return u[0] * v[1] - u[1] * v[0]  # == <R(pi/2) u, v>

    return turn(a, b) > 0 and turn(b, c) > 0 and turn(c, a) > 0


def operator_norm(a) -> float:
    """Largest singular value via the closed-form eigenvalues of ``A^T A``.

    Only matrices with at most three columns are supported; for two rows we
    use the 2x2 Gram matrix ``A A^T`` which has the same nonzero spectrum.
    """
    a = np.asarray(a, dtype=float)
    g = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    n = g.shape[0]
    if n == 1:
        return math.sqrt(max(g[0, 0], 0.0))
    if n == 2:
        # stable form: no cancellation when the eigenvalues coincide
        tr = g[0, 0] + g[1, 1]
        disc = math.hypot((g[0, 0] - g[1, 1]) / 2, g[0, 1])
        return math.sqrt(max(tr / 2 + disc, 0.0))
    if n == 3:
        # trigonometric solution of the symmetric cubic
        q = np.trace(g) / 3
        off = g[0, 1] ** 2 + g[0, 2] ** 2 + g[1, 2] ** 2
        p2 = (g[0, 0] - q) ** 2 + (g[1, 1] - q) ** 2 + (g[2, 2] - q) ** 2 + 2 * off
        p = math.sqrt(p2 / 6)
        if p == 0.0:
            return math.sqrt(max(q, 0.0))
        b = (g - q * np.eye(3)) / p
        r = np.linalg.det(b) / 2
        r = min(1.0, max(-1.0, r))
        lam = q + 2 * p * math.cos(math.acos(r) / 3)
        return math.sqrt(max(lam, 0.0))
    raise ValueError("operator_norm supports matrices with min dimension <= 3")
