"""Floating-point versions of the exclusion theorems (builder side).

By default the inequalities are the plain real-number theorems.  With
``rational_safe=True`` the floats reproduce every constant of the rational
versions (kappa terms, sqrt 2 -> 1.42, sqrt 5 -> 2.24), so that a witness
accepted here with a positive safety margin is also accepted by the exact
verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import geometry as geo
from .types import CheckResult, GlobalWitness, LocalWitness, Step, failed, passed

KAPPA = 1e-10
DEFAULT_MARGIN = 1e-6


@dataclass(frozen=True)
class Constants:
    sqrt2: float
    sqrt5: float
    kappa: float

    @classmethod
    def choose(cls, rational_safe: bool):
        if rational_safe:
            return cls(1.42, 2.24, KAPPA)
        return cls(math.sqrt(2.0), math.sqrt(5.0), 0.0)


def _beats(lhs, rhs, margin):
    """``lhs > rhs`` with a relative safety margin."""
    return lhs - rhs > margin * max(1.0, abs(lhs), abs(rhs))


def global_values(V, center, eps, s_index, w, kappa=0.0):
    """G and the vector of all H_P of the global theorem."""
    t1, f1, t2, f2, a = center
    w = np.asarray(w, dtype=float)
    S = V[s_index]
    R, Rd = geo.rot2(a), geo.rot2_deriv(a)
    M1 = geo.projection(t1, f1)
    v = M1 @ S
    G = (w @ (R @ v)
         - eps * (abs(w @ (Rd @ v)) + abs(w @ (R @ (geo.projection_dtheta(t1, f1) @ S)))
                  + abs(w @ (R @ (geo.projection_dphi(t1, f1) @ S))))
         - 4.5 * eps * eps - 4 * kappa * (1 + 3 * eps))
    u = w @ geo.projection(t2, f2)
    ut = w @ geo.projection_dtheta(t2, f2)
    uf = w @ geo.projection_dphi(t2, f2)
    H = V @ u + eps * (np.abs(V @ ut) + np.abs(V @ uf)) + 2 * eps * eps + 3 * kappa * (1 + 2 * eps)
    return G, H


def global_check_float(V, center, eps, wit, margin=DEFAULT_MARGIN, rational_safe=False) -> CheckResult:
    """Global theorem in doubles.  ``wit`` is a GlobalWitness or ``(S, w)``."""
    if isinstance(wit, GlobalWitness):
        s_index, w = wit.s_index, wit.w_float()
    else:
        s_index, w = wit
    kappa = KAPPA if rational_safe else 0.0
    G, H = global_values(np.asarray(V, dtype=float), center, eps, s_index, w, kappa)
    mh = float(H.max())
    if _beats(G, mh, margin):
        return passed(G=G, max_H=mh)
    return failed(Step.GLOBAL, "G <= max H", G=G, max_H=mh)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def b_lhs_matrix(V, Y, eps, const: Constants, rows=None):
    """Left-hand side of condition (B) for Q_i = V[rows] against every Q_j.

    Entries with ``j == i`` are +inf.  ``Y`` are the projections of ``V``.
    """
    rows = np.arange(len(V)) if rows is None else np.asarray(rows)
    k, s2 = const.kappa, const.sqrt2
    Yi = Y[rows][:, None, :]
    D = Yi - Y[None, :, :]
    num = (np.einsum("ijk,ijk->ij", np.broadcast_to(Yi, D.shape), D) - 10 * k
           - 2 * eps * (np.linalg.norm(V[rows][:, None, :] - V[None, :, :], axis=2) + 2 * k) * (s2 + eps))
    den = ((np.linalg.norm(Y[rows], axis=1) + s2 * eps + 3 * k)[:, None]
           * (np.linalg.norm(D, axis=2) + 2 * s2 * eps + 6 * k))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    out[np.arange(len(rows)), rows] = np.inf
    return out


def local_check_float(V, center, eps, wit: LocalWitness, margin=DEFAULT_MARGIN,
                      rational_safe=False, check_congruence=True) -> CheckResult:
    """Local theorem in doubles, in the same order as the exact verifier."""
    V = np.asarray(V, dtype=float)
    c = Constants.choose(rational_safe)
    k = c.kappa
    t1, f1, t2, f2, a = center
    p, q = list(wit.p), list(wit.q)
    r = wit.r / 1000.0
    if r <= 0:
        return failed(Step.WITNESS, "r must be positive")
    P, Q = V[p], V[q]
    if check_congruence and np.abs(P @ P.T - Q @ Q.T).max() > 1e-9:
        return failed(Step.CONGRUENCE, "Gram matrices differ")
    if check_congruence and abs(np.linalg.det(Q)) < 1e-9:
        return failed(Step.CONGRUENCE, "Q triple is degenerate")
    X1, X2 = geo.direction(t1, f1), geo.direction(t2, f2)
    M1, M2 = geo.projection(t1, f1), geo.projection(t2, f2)
    thr_a = c.sqrt2 * eps + 3 * k
    sq = -1.0 if wit.sigma_q else 1.0
    if not all(_beats(x, thr_a, margin) for x in P @ X1):
        return failed(Step.CONDITION_A, "<X1, P_i> too small")
    if not all(_beats(x, thr_a, margin) for x in sq * (Q @ X2)):
        return failed(Step.CONDITION_A, "(-1)^sigma_Q <X2, Q_i> too small")
    thr_s = 2 * eps * (c.sqrt2 + eps) + 6 * k
    mp, mq = P @ M1.T, Q @ M2.T
    for img, name in ((mp, "P"), (mq, "Q")):
        crosses = _cross(img, np.roll(img, -1, axis=0))
        if not all(_beats(x, thr_s, margin) for x in crosses):
            return failed(Step.SPANNING, f"{name} triple not spanning")
    R = geo.rot2(a)
    delta = float(np.linalg.norm(mp @ R.T - mq, axis=1).max()) / 2 + 3 * k
    norms = np.linalg.norm(mq, axis=1)
    if not all(_beats(x, r + c.sqrt2 * eps + 3 * k, margin) for x in norms):
        return failed(Step.MIN_NORM, "|M2 Q_i| <= r + sqrt2 eps")
    rhs = (c.sqrt5 * eps + delta) / r
    Y = V @ M2.T
    lhs = b_lhs_matrix(V, Y, eps, c, rows=q).min(axis=1)
    if not all(_beats(x, rhs, margin) for x in lhs):
        return failed(Step.CONDITION_B, "LMD inequality fails", lhs=lhs, rhs=rhs)
    return passed(delta=delta, lhs=lhs, rhs=rhs)
