import math
import random

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PHI_MIRROR_Q, PHI_Q, THETA_Q
from rupert import geometry as geo
from rupert.builder import BuildConfig, propose_global_witness, propose_local_witness
from rupert.exact import projQ
from rupert.exclusion.floating import Constants, b_lhs_matrix, global_check_float, global_values, local_check_float
from rupert.exclusion.rational import (condition_A, condition_B, congruent_exact, eps_kappa_spanning,
                                       global_check_rational, local_check_rational)
from rupert.exclusion.types import GlobalWitness, LocalWitness, Step

DIAG = (math.pi / 4, math.atan(math.sqrt(2)))
GLOBAL_CENTER = (0.0, 0.0, *DIAG, 0.0)
GLOBAL_CENTER_Q = (0, 0, THETA_Q, PHI_Q, 0)
O3_W = GlobalWitness(2, 1, 0, 1)  # S = O3 = (0, 1, 0), w = (1, 0)
DIAG_Q = (THETA_Q, PHI_Q, THETA_Q, PHI_Q, 0)
MIRROR_Q = (THETA_Q, PHI_Q, THETA_Q, PHI_MIRROR_Q, 0)
TRIPLE = LocalWitness((0, 1, 2), (0, 1, 2), 700, 0)
MIRROR = LocalWitness((0, 1, 2), (0, 4, 3), 700, 1)
RUP_SOLUTION = (0.29, 0.29, 0.02, 2.27, -1.02)


def _closed_form(eps):
    # G = 1 - 9 eps^2 / 2 and max H = sqrt2/2 + eps sqrt2/2 + 2 eps^2 for the octahedron example
    return 1 - 4.5 * eps * eps, math.sqrt(2) / 2 + eps * math.sqrt(2) / 2 + 2 * eps * eps


@pytest.mark.parametrize("eps", [0.01, 0.1, 0.16, 0.17, 0.2])
def test_global_values_closed_form(octa, eps):
    G, H = global_values(octa.vertices, GLOBAL_CENTER, eps, 2, (1, 0))
    g, h = _closed_form(eps)
    assert G == pytest.approx(g, abs=1e-12)
    assert H.max() == pytest.approx(h, abs=1e-12)


def test_global_float_octahedron(octa):
    V = octa.vertices
    assert global_check_float(V, GLOBAL_CENTER, 0.1, O3_W).excluded
    res = global_check_float(V, GLOBAL_CENTER, 0.2, O3_W)
    assert not res.excluded and res.step == Step.GLOBAL
    assert res.values["G"] == pytest.approx(0.82)
    assert res.values["max_H"] == pytest.approx(0.928, abs=1e-3)
    # threshold sits near 0.164
    assert global_check_float(V, GLOBAL_CENTER, 0.164, O3_W, margin=0).excluded
    assert not global_check_float(V, GLOBAL_CENTER, 0.165, O3_W, margin=0).excluded
    # tuple witnesses are accepted too
    assert global_check_float(V, GLOBAL_CENTER, 1e-6, (2, (1.0, 0.0))).excluded


def test_global_rational_octahedron(octa_q):
    assert global_check_rational(octa_q, GLOBAL_CENTER_Q, mpq(1, 10), O3_W).excluded
    assert not global_check_rational(octa_q, GLOBAL_CENTER_Q, mpq(2, 10), O3_W).excluded
    res = global_check_rational(octa_q, GLOBAL_CENTER_Q, mpq(1, 10), GlobalWitness(2, 1, 1, 1))
    assert res.step == Step.UNIT_VECTOR
    assert global_check_rational(octa_q, GLOBAL_CENTER_Q, mpq(1, 10), GlobalWitness(2, 3, 4, 5)).step == Step.GLOBAL
    assert global_check_rational(octa_q, (5, 0, 0, 0, 0), mpq(1, 10), O3_W).step == Step.DOMAIN
    assert global_check_rational(octa_q, GLOBAL_CENTER_Q, mpq(1, 10), GlobalWitness(9, 1, 0, 1)).step == Step.WITNESS


def test_spanning(octa_q):
    M = projQ(THETA_Q, PHI_Q)
    imgs = [tuple(sum(m * c for m, c in zip(row, octa_q.points[i])) for row in M) for i in range(3)]
    assert eps_kappa_spanning(imgs, mpq(5, 100))
    assert not eps_kappa_spanning(imgs, mpq(2, 10))
    line = [(mpq(1), mpq(0)), (mpq(2), mpq(0)), (mpq(-1), mpq(0))]
    assert not eps_kappa_spanning(line, mpq(1, 1000))


def test_condition_a(octa_q):
    x = (mpq(577350269, 10**9),) * 3  # about X = (1,1,1)/sqrt 3
    pts = octa_q.points[:3]
    assert condition_A(x, pts, 0, mpq(5, 100))
    assert not condition_A(x, pts, 1, mpq(5, 100))
    assert not condition_A(x, pts, 0, mpq(41, 100))


def _octa_images(octa_q, theta, phi):
    M = projQ(theta, phi)
    return [tuple(sum(m * c for m, c in zip(row, p)) for row in M) for p in octa_q.points]


def test_condition_b_limits(octa):
    # eps = 0 limits for Q = O1: sqrt3/2 against O2, O3; 1/2 against O4, O5; 1 against O6
    Y = octa.vertices @ geo.projection(*DIAG).T
    lhs = b_lhs_matrix(octa.vertices, Y, 0.0, Constants.choose(False), rows=[0])[0]
    assert lhs[1] == pytest.approx(math.sqrt(3) / 2) and lhs[2] == pytest.approx(math.sqrt(3) / 2)
    assert lhs[3] == pytest.approx(0.5) and lhs[4] == pytest.approx(0.5)
    assert lhs[5] == pytest.approx(1.0)
    assert lhs[0] == math.inf


def test_condition_b_octahedron_example(octa_q):
    allq = _octa_images(octa_q, THETA_Q, PHI_Q)
    q = (0, 1, 2)
    imgs = [allq[i] for i in q]
    # with the rational constants the quoted pair r = 0.7, eps = 0.05 does not pass (see notes)
    res = condition_B(octa_q, imgs, q, mpq(7, 10), 0, mpq(5, 100), allq)
    assert not res.excluded and res.step == Step.CONDITION_B
    assert condition_B(octa_q, imgs, q, mpq(7, 10), 0, mpq(1, 25), allq).excluded
    # r >= sqrt6/3 ~ 0.8165 violates the min-norm precondition
    res = condition_B(octa_q, imgs, q, mpq(817, 1000), 0, mpq(1, 100), allq)
    assert res.step == Step.MIN_NORM
    assert condition_B(octa_q, imgs, q, 0, 0, mpq(1, 100), allq).step == Step.WITNESS


def test_congruence(octa):
    assert congruent_exact(octa, (0, 1, 2), (0, 1, 2))
    assert congruent_exact(octa, (0, 1, 2), (0, 4, 3))
    assert not congruent_exact(octa, (0, 1, 2), (0, 1, 5))
    assert not congruent_exact(octa, (0, 5, 1), (0, 5, 1))  # det = 0


def test_congruence_orbit(nop):
    # rotating a triple by R_z(2 pi/15) keeps it congruent
    p = (0, 20, 50)
    q = tuple(nop.index_of(i, k + 1, l) for i, k, l in map(nop.orbit_of, p))
    assert congruent_exact(nop, p, q)
    assert not congruent_exact(nop, p, (0, 20, 51))


def test_local_rational_octahedron(octa_q):
    for eps in (mpq(1, 25), mpq(48, 1000)):
        assert local_check_rational(octa_q, DIAG_Q, eps, TRIPLE).excluded
        assert local_check_rational(octa_q, MIRROR_Q, eps, MIRROR).excluded
    res = local_check_rational(octa_q, DIAG_Q, mpq(1, 20), TRIPLE)
    assert res.step == Step.CONDITION_B
    bad = LocalWitness((0, 1, 2), (0, 1, 5), 700, 0)
    assert local_check_rational(octa_q, DIAG_Q, mpq(1, 25), bad).step == Step.CONGRUENCE
    wrong_sign = LocalWitness((0, 1, 2), (0, 1, 2), 700, 1)
    assert local_check_rational(octa_q, DIAG_Q, mpq(1, 25), wrong_sign).step == Step.CONDITION_A
    assert local_check_rational(octa_q, DIAG_Q, mpq(1, 25), LocalWitness((0, 1, 2), (0, 1, 2), 0, 0)).step == Step.WITNESS
    assert local_check_rational(octa_q, DIAG_Q, mpq(1, 25), LocalWitness((0, 1, 9), (0, 1, 2), 7, 0)).step == Step.WITNESS
    assert local_check_rational(octa_q, DIAG_Q, mpq(1, 25), LocalWitness((0, 1, 2), (0, 1, 2), 900, 0)).step == Step.MIN_NORM


def test_local_float_octahedron(octa):
    V = octa.vertices
    c = tuple(float(x) for x in DIAG_Q)
    cm = tuple(float(x) for x in MIRROR_Q)
    assert local_check_float(V, c, 0.04, TRIPLE).excluded
    assert local_check_float(V, cm, 0.04, MIRROR).excluded
    assert local_check_float(V, c, 0.3, TRIPLE).step == Step.SPANNING
    # O1, O2, O6 project to a triangle that misses the origin
    nonspan = LocalWitness((0, 1, 5), (0, 1, 5), 500, 0)
    assert not local_check_float(V, c, 0.01, nonspan, check_congruence=False).excluded


def test_float_and_rational_agree_on_octahedron_thresholds(octa, octa_q):
    for e in (mpq(1, 100), mpq(4, 100), mpq(47, 1000)):
        exact = local_check_rational(octa_q, DIAG_Q, e, TRIPLE).excluded
        flt = local_check_float(octa.vertices, tuple(float(x) for x in DIAG_Q), float(e), TRIPLE,
                                rational_safe=True).excluded
        assert exact and flt


@pytest.fixture(scope="module")
def nop_cases(nop):
    """Random NOP centers with builder-proposed global witnesses."""
    rng = random.Random(11)
    cfg = BuildConfig()
    out = []
    while len(out) < 25:
        c = (rng.uniform(0, 0.41), rng.uniform(0, 3.14), rng.uniform(0, 0.41), rng.uniform(0, 1.57),
             rng.uniform(-1.57, 1.57))
        wit = propose_global_witness(nop, np.array(c), 0.0, cfg)
        if wit is not None:
            out.append((c, wit))
    return out


def test_soundness_coupling_global(nop, nop_q, nop_cases):
    N = 10**6
    checked = 0
    for c, wit in nop_cases:
        cq = tuple(mpq(round(x * N), N) for x in c)
        for eps in (mpq(1, 10**4), mpq(1, 10**3), mpq(5, 10**3)):
            if global_check_rational(nop_q, cq, eps, wit).excluded:
                checked += 1
                fc = tuple(float(x) for x in cq)
                assert global_check_float(nop.vertices, fc, float(eps), wit, margin=0).excluded
    assert checked > 10


def test_one_sided_near_rupert_solution(rup, rup_q):
    # boxes containing a genuine solution are never excluded
    rng = random.Random(2)
    cfg = BuildConfig()
    sol = np.array(RUP_SOLUTION)
    for _ in range(6):
        eps = rng.choice([0.001, 0.01, 0.05])
        c = sol + np.array([rng.uniform(-eps, eps) for _ in range(5)]) * 0.9
        gw = propose_global_witness(rup, c, eps, cfg)
        if gw is not None:
            cq = tuple(mpq(round(x * 10**6), 10**6) for x in c)
            assert not global_check_rational(rup_q, cq, mpq(eps), gw).excluded
            assert not global_check_float(rup.vertices, c, eps, gw, margin=0).excluded
        lw = propose_local_witness(rup, c, eps, cfg)
        if lw is not None:
            assert not local_check_float(rup.vertices, c, eps, lw, margin=0).excluded


def _positive_coeffs(P, x):
    return np.linalg.solve(np.asarray(P).T, x)


def test_span_plus_consistency(octa):
    # condition A and spanning at the center put X(theta, phi) in span+ for all nearby directions
    P = octa.vertices[:3]
    eps = 0.05
    rng = np.random.default_rng(7)
    for _ in range(100):
        t = DIAG[0] + rng.uniform(-eps, eps)
        f = DIAG[1] + rng.uniform(-eps, eps)
        assert (_positive_coeffs(P, geo.direction(t, f)) > 0).all()


def test_span_plus_consistency_nop(nop):
    cfg = BuildConfig()
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(30):
        t, f = rng.uniform(0, 0.4), rng.uniform(0.2, 2.9)
        c = np.array([t, f, t, f, 0.0])
        eps = 0.002
        wit = propose_local_witness(nop, c, eps, cfg)
        if wit is None:
            continue
        P = nop.vertices[list(wit.p)]
        for _ in range(100):
            x = geo.direction(t + rng.uniform(-eps, eps), f + rng.uniform(-eps, eps))
            assert (_positive_coeffs(P, x) > 0).all()
        checked += 1
    assert checked >= 10


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_argmax_impossibility(seed):
    rng = np.random.default_rng(seed)
    Vs = rng.normal(size=(3, 3))
    if abs(np.linalg.det(Vs)) < 1e-3:
        return
    y = Vs.T @ rng.uniform(0.01, 1, 3)
    z = Vs.T @ rng.uniform(0.01, 1, 3)
    y, z = y / np.linalg.norm(y), z / np.linalg.norm(z)
    if np.linalg.norm(y - z) < 1e-9:
        return
    assert not all(Vs @ y > Vs @ z)
