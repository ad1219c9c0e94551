import math

import numpy as np
import pytest
from gmpy2 import mpq

from conftest import PHI_Q, THETA_Q
from rupert.find import (DegenerateHull, RupertSolution, SearchConfig, certify_solution, exact_hull,
                         export_projection, nieuwland_lower, projection_layers, scale_ratio, search_solution)

RUP_ANGLES = (mpq(29, 100), mpq(29, 100), mpq(2, 100), mpq(227, 100), mpq(-102, 100))
CUBE_ANGLES = (0, 0, THETA_Q, PHI_Q, 0)


def test_exact_hull():
    pts = [(mpq(0), mpq(0)), (mpq(2), mpq(0)), (mpq(2), mpq(2)), (mpq(0), mpq(2)), (mpq(1), mpq(1)),
           (mpq(1), mpq(0))]
    hull = exact_hull(pts)
    assert sorted(hull) == sorted(pts[:4])
    with pytest.raises(DegenerateHull):
        exact_hull([(mpq(0), mpq(0)), (mpq(1), mpq(1)), (mpq(2), mpq(2))])


def test_ruperthedron_solution(rup):
    sol = RupertSolution.make(RUP_ANGLES)
    assert certify_solution(rup, sol)
    assert certify_solution(rup, sol.scaled(mpq(1003, 1000)))
    assert nieuwland_lower(rup, sol) >= mpq(1003, 1000)


def test_cube_square_in_hexagon(cube):
    sol = RupertSolution.make(CUBE_ANGLES)
    assert certify_solution(cube, sol)
    nu = nieuwland_lower(cube, sol)
    assert nu >= 1
    assert not certify_solution(cube, sol.scaled(nu + mpq(1, 100)))


def test_identical_projections_fail(cube, nop):
    for p in (cube, nop):
        sol = RupertSolution.make((mpq(3, 10), mpq(11, 10), mpq(3, 10), mpq(11, 10), 0))
        assert not certify_solution(p, sol)
        assert nieuwland_lower(p, sol) == 0


def test_scale_monotone(rup):
    sol = RupertSolution.make(RUP_ANGLES)
    nu = nieuwland_lower(rup, sol)
    ok = [certify_solution(rup, sol.scaled(s)) for s in (mpq(1, 2), mpq(9, 10), 1, nu)]
    assert all(ok)
    assert not certify_solution(rup, sol.scaled(nu + mpq(1, 10)))


def test_scale_ratio_symmetry(nop):
    V = nop.vertices
    psi = np.array([0.1, 1.2, 0.3, 0.9, 0.4])
    shifted = psi + np.array([2 * math.pi / 15, 0, 0, 0, 0])
    assert scale_ratio(V, psi) == pytest.approx(scale_ratio(V, shifted), rel=1e-9)
    shifted2 = psi + np.array([0, 0, 2 * math.pi / 15, 0, 0])
    assert scale_ratio(V, psi) == pytest.approx(scale_ratio(V, shifted2), rel=1e-9)


def test_noperthedron_random_points_fail(nop):
    rng = np.random.default_rng(3)
    V = nop.vertices
    for _ in range(300):
        psi = rng.random(5) * np.array([2 * math.pi / 15, math.pi, 2 * math.pi / 15, math.pi / 2, math.pi])
        psi[4] -= math.pi / 2
        assert scale_ratio(V, psi) < 1


def test_search_cube():
    from rupert.solids import get_solid
    cube = get_solid("cube")
    sol = search_solution(cube, SearchConfig(starts=60, seed=0))
    assert sol is not None and sol.nu > 1
    assert certify_solution(cube, sol.scaled(1))


def test_search_noperthedron_small_budget(nop):
    assert search_solution(nop, SearchConfig(starts=5, seed=1, max_iter=100)) is None


def test_export_csv_and_svg(cube, octa):
    text = export_projection(cube, 0, 0, fmt="csv")
    rows = [line.split(",") for line in text.splitlines()[1:]]
    hull = [(float(x), float(y)) for x, y, layer in rows if layer == "hull"]
    # the top view of the cube is a square (closed polyline: 5 points)
    assert len(hull) == 5 and hull[0] == hull[-1]
    assert len({round(abs(x), 9) for x, _ in hull}) == 1
    layers = projection_layers(octa, math.pi / 4, math.atan(math.sqrt(2)))
    assert len(layers["hull"]) == 7  # a regular hexagon
    r = np.linalg.norm(layers["hull"][:-1], axis=1)
    assert np.allclose(r, r[0])
    svg = export_projection(cube, 0, 0, fmt="svg")
    assert svg.startswith("<?xml") and svg.count("<polyline") == 1 and svg.count("<circle") == 8
    with pytest.raises(ValueError):
        export_projection(cube, 0, 0, fmt="png")


def test_export_inner_layer(cube, tmp_path):
    out = tmp_path / "p.csv"
    export_projection(cube, THETA_Q, PHI_Q, alpha=0.1, inner=(0, 0), out=out)
    layers = {line.rsplit(",", 1)[1] for line in out.read_text().splitlines()[1:]}
    assert layers == {"inner", "outer", "hull"}
