"""Exact rational versions of the global and local exclusion theorems.

This module is part of the trusted base: it uses only the exact kernels and
the exact vertex data of a polyhedron, never floating point.  Vertices are
the truncations ``floor(10^16 P) / 10^16``; the theorem constants below
absorb the truncation and trig-series errors (kappa = 10^-10).
"""

from __future__ import annotations


import gmpy2
from gmpy2 import mpq, mpz

from ..exact import KAPPA, SQRT2_UP, SQRT5_UP, TRIG_DOMAIN, sincosQ, sqrt_lower, sqrt_upper
from .types import CheckResult, GlobalWitness, LocalWitness, Step, failed, passed

_ZERO = mpq(0)
_NINE_HALVES = mpq(9, 2)


class RationalSolid:
    """Exact data of a polyhedron needed by the rational checkers."""

    def __init__(self, poly, digits: int = 16):
        self.poly = poly
        self.n = poly.n
        self.digits = digits
        self.scale = mpz(10) ** digits
        self.ints = [tuple(mpz(c) for c in row) for row in poly.truncated_numerators(digits)]
        self.points = [tuple(mpq(c, self.scale) for c in row) for row in self.ints]
        self._diff_upper = {}
        self._congruent = {}

    def diff_norm_upper(self, i: int, j: int) -> mpq:
        """``|P~_i - P~_j|_+`` (cached; depends on vertex data only)."""
        key = (i, j) if i < j else (j, i)
        v = self._diff_upper.get(key)
        if v is None:
            a, b = self.ints[i], self.ints[j]
            sq = sum(((x - y) ** 2 for x, y in zip(a, b)), mpz(0))
            v = sqrt_upper(mpq(sq, self.scale * self.scale))
            self._diff_upper[key] = v
        return v

    def congruent(self, p, q) -> bool:
        """Exact Gram-matrix equality of the true triples and det(Q) != 0."""
        key = (tuple(p), tuple(q))
        if key not in self._congruent:
            self._congruent[key] = congruent_exact(self.poly, p, q)
        return self._congruent[key]


def congruent_exact(poly, p, q) -> bool:
    for a in range(3):
        for b in range(a, 3):
            if poly.gram(p[a], p[b]) != poly.gram(q[a], q[b]):
                return False
    return not poly.det3(q).is_zero()


def _in_domain(center) -> bool:
    return all(-TRIG_DOMAIN <= c <= TRIG_DOMAIN for c in center)


def _abs(x):
    return -x if x < 0 else x


# -- global theorem ----------------------------------------------------------

def global_check_rational(solid: RationalSolid, center, eps, wit: GlobalWitness) -> CheckResult:
    """Rational global theorem at ``center`` with half-width ``eps``."""
    eps = mpq(eps)
    center = tuple(mpq(c) for c in center)
    if not _in_domain(center):
        return failed(Step.DOMAIN, "midpoint outside [-4, 4]")
    if wit.wd == 0 or not 0 <= wit.s_index < solid.n:
        return failed(Step.WITNESS, "bad S index or zero denominator")
    wx, wy = wit.w()
    if wx * wx + wy * wy != 1:
        return failed(Step.UNIT_VECTOR, "|w|^2 != 1")
    t1, f1, t2, f2, al = center
    st1, ct1 = sincosQ(t1)
    sp1, cp1 = sincosQ(f1)
    st2, ct2 = sincosQ(t2)
    sp2, cp2 = sincosQ(f2)
    sa, ca = sincosQ(al)

    sx, sy, sz = solid.points[wit.s_index]
    m1s = (-st1 * sx + ct1 * sy, -ct1 * cp1 * sx - st1 * cp1 * sy + sp1 * sz)
    m1t = (-ct1 * sx - st1 * sy, st1 * cp1 * sx - ct1 * cp1 * sy)
    m1f1 = ct1 * sp1 * sx + st1 * sp1 * sy + cp1 * sz  # M1^phi S = (0, m1f1)
    # <R v, w> = <v, R^T w> and <R' v, w> = <v, R'^T w>
    rw = (ca * wx + sa * wy, -sa * wx + ca * wy)
    rdw = (-sa * wx + ca * wy, -ca * wx - sa * wy)
    g0 = m1s[0] * rw[0] + m1s[1] * rw[1]
    g_a = m1s[0] * rdw[0] + m1s[1] * rdw[1]
    g_t = m1t[0] * rw[0] + m1t[1] * rw[1]
    g_f = m1f1 * rw[1]
    G = g0 - eps * (_abs(g_a) + _abs(g_t) + _abs(g_f)) - _NINE_HALVES * eps * eps - 4 * KAPPA * (1 + 3 * eps)

    # H_P = <u, P> + eps (|<u_t, P>| + |<u_f, P>|) + c with u = M2^T w etc.
    c2w = cp2 * wy
    u = (-st2 * wx - ct2 * c2w, ct2 * wx - st2 * c2w, sp2 * wy)
    ut = (-ct2 * wx + st2 * c2w, -st2 * wx - ct2 * c2w)
    uf = (ct2 * sp2 * wy, st2 * sp2 * wy, c2w)
    const = 2 * eps * eps + 3 * KAPPA * (1 + 2 * eps)

    # integer form: scale all linear forms to a common denominator D
    entries = u + ut + uf
    D = mpz(1)
    for e in entries:
        D = gmpy2.lcm(D, e.denominator)
    U = [mpz(e * D) for e in u]
    Ut = [mpz(e * D) for e in ut]
    Uf = [mpz(e * D) for e in uf]
    en, ed = eps.numerator, eps.denominator
    best = None
    for x, y, z in solid.ints:
        val = ed * (U[0] * x + U[1] * y + U[2] * z) + en * (
            _abs(Ut[0] * x + Ut[1] * y) + _abs(Uf[0] * x + Uf[1] * y + Uf[2] * z))
        if best is None or val > best:
            best = val
    # max_P H_P = best / (ed * D * scale) + const
    max_h = mpq(best, ed * D * solid.scale) + const
    if G > max_h:
        return passed(G=G, max_H=max_h)
    return failed(Step.GLOBAL, "G <= max H", G=G, max_H=max_h)


# -- local theorem -------------------------------------------------------------

def _proj(st, ct, sp, cp, v):
    x, y, z = v
    return (-st * x + ct * y, -ct * cp * x - st * cp * y + sp * z)


def _cross(a, b):
    # <R(pi/2) a, b>
    return a[0] * b[1] - a[1] * b[0]


def eps_kappa_spanning(images, eps) -> bool:
    """Def. of eps-kappa-spanning, given the three projected points."""
    thr = 2 * eps * (SQRT2_UP + eps) + 6 * KAPPA
    a, b, c = images
    return _cross(a, b) > thr and _cross(b, c) > thr and _cross(c, a) > thr


def condition_A(xq, points, sigma, eps) -> bool:
    thr = SQRT2_UP * eps + 3 * KAPPA
    sgn = -1 if sigma else 1
    return all(sgn * sum((a * b for a, b in zip(xq, p)), _ZERO) > thr for p in points)


def condition_B(solid: RationalSolid, images, q_idx, r, delta, eps, vertex_images=None) -> CheckResult:
    """Condition (B) for the Q-triple; ``images`` are the projections M2 Q~_i.

    ``vertex_images`` are the projections of all vertices (computed if not
    given).  The min-norm precondition is reported as its own step.
    """
    r, delta, eps = mpq(r), mpq(delta), mpq(eps)
    if r <= 0:
        return failed(Step.WITNESS, "r must be positive")
    s2e = SQRT2_UP * eps
    for y in images:
        if sqrt_lower(y[0] * y[0] + y[1] * y[1]) <= r + s2e + 3 * KAPPA:
            return failed(Step.MIN_NORM, "|M2 Q_i|_- <= r + sqrt2 eps + 3 kappa")
    rhs = (SQRT5_UP * eps + delta) / r
    if vertex_images is None:
        raise ValueError("vertex_images required")
    dist_coef = 2 * eps * (SQRT2_UP + eps)
    fixed = s2e + 3 * KAPPA
    two_fixed = 2 * s2e + 6 * KAPPA
    for i, qi in enumerate(q_idx):
        yi = images[i]
        ny = sqrt_upper(yi[0] * yi[0] + yi[1] * yi[1]) + fixed
        for j in range(solid.n):
            if j == qi:
                continue
            yj = vertex_images[j]
            dx, dy = yi[0] - yj[0], yi[1] - yj[1]
            num = yi[0] * dx + yi[1] * dy - 10 * KAPPA - dist_coef * (solid.diff_norm_upper(qi, j) + 2 * KAPPA)
            if num <= 0:
                return failed(Step.CONDITION_B, f"Q{i + 1} against vertex {j}: nonpositive numerator")
            den = ny * (sqrt_upper(dx * dx + dy * dy) + two_fixed)
            if not num > rhs * den:
                return failed(Step.CONDITION_B, f"Q{i + 1} against vertex {j}")
    return passed()


def local_check_rational(solid: RationalSolid, center, eps, wit: LocalWitness) -> CheckResult:
    """Rational local theorem, steps in the verifier's order."""
    eps = mpq(eps)
    center = tuple(mpq(c) for c in center)
    if not _in_domain(center):
        return failed(Step.DOMAIN, "midpoint outside [-4, 4]")
    n = solid.n
    idx = tuple(wit.p) + tuple(wit.q)
    if len(idx) != 6 or not all(0 <= i < n for i in idx) or wit.sigma_q not in (0, 1):
        return failed(Step.WITNESS, "vertex index or sigma_Q out of range")
    if wit.r <= 0:
        return failed(Step.WITNESS, "r must be positive")
    # step 3: congruence of the true triples
    if not solid.congruent(wit.p, wit.q):
        return failed(Step.CONGRUENCE, "P and Q triples are not congruent")
    # step 4: matrices
    t1, f1, t2, f2, al = center
    st1, ct1 = sincosQ(t1)
    sp1, cp1 = sincosQ(f1)
    st2, ct2 = sincosQ(t2)
    sp2, cp2 = sincosQ(f2)
    sa, ca = sincosQ(al)
    x1 = (ct1 * sp1, st1 * sp1, cp1)
    x2 = (ct2 * sp2, st2 * sp2, cp2)
    P = [solid.points[i] for i in wit.p]
    Q = [solid.points[i] for i in wit.q]
    # step 5: condition A (sigma_P = 0)
    if not condition_A(x1, P, 0, eps):
        return failed(Step.CONDITION_A, "<X1, P_i> too small")
    if not condition_A(x2, Q, wit.sigma_q, eps):
        return failed(Step.CONDITION_A, "(-1)^sigma_Q <X2, Q_i> too small")
    # step 6: spanning
    mp = [_proj(st1, ct1, sp1, cp1, v) for v in P]
    mq = [_proj(st2, ct2, sp2, cp2, v) for v in Q]
    if not eps_kappa_spanning(mp, eps):
        return failed(Step.SPANNING, "P triple not eps-kappa-spanning")
    if not eps_kappa_spanning(mq, eps):
        return failed(Step.SPANNING, "Q triple not eps-kappa-spanning")
    # step 7: delta
    delta = _ZERO
    for a, b in zip(mp, mq):
        ra = (ca * a[0] - sa * a[1], sa * a[0] + ca * a[1])
        dx, dy = ra[0] - b[0], ra[1] - b[1]
        d = sqrt_upper(dx * dx + dy * dy)
        if d > delta:
            delta = d
    delta = delta / 2 + 3 * KAPPA
    # steps 8 and 9
    allq = [_proj(st2, ct2, sp2, cp2, v) for v in solid.points]
    res = condition_B(solid, mq, tuple(wit.q), wit.r_value(), delta, eps, allq)
    if not res.excluded:
        return res
    return passed(delta=delta)
