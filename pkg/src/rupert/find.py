"""Finding and certifying Rupert solutions, and Nieuwland lower bounds.

A solution is certified exactly: both shadows are computed from the
rational kernels and the truncated vertices, the outer hull is built in
rational arithmetic, and every scaled inner point must clear every outer
edge by more than ``100 kappa``.  This slack dominates the kernel and
truncation errors (each at most a few kappa), so the true shadows satisfy
strict containment too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, QhullError

from . import geometry as geo
from .exact import KAPPA, TRIG_DOMAIN, projQ, rotQ, to_q

SLACK = 100 * KAPPA
NU_RESOLUTION = mpq(1, 10**4)


class DegenerateHull(ValueError):
    pass


@dataclass(frozen=True)
class RupertSolution:
    theta1: mpq
    phi1: mpq
    theta2: mpq
    phi2: mpq
    alpha: mpq
    nu: mpq = mpq(1)

    @classmethod
    def make(cls, angles, nu=1):
        return cls(*(to_q(a) for a in angles), to_q(nu))

    def angles(self):
        return (self.theta1, self.phi1, self.theta2, self.phi2, self.alpha)

    def scaled(self, nu):
        return RupertSolution(*self.angles(), to_q(nu))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def exact_hull(points):
    """Counter-clockwise strict convex hull of rational 2-D points."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise DegenerateHull("fewer than three distinct points")
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHull("all points are collinear")
    return hull


def _shadow(mat, pts):
    return [(sum(m * c for m, c in zip(mat[0], p)), sum(m * c for m, c in zip(mat[1], p))) for p in pts]


def _shadows(solid, sol):
    t1, f1, t2, f2, a = sol.angles()
    if any(abs(x) > TRIG_DOMAIN for x in sol.angles()):
        raise ValueError("angles must lie in [-4, 4]")
    pts = solid.points
    outer = _shadow(projQ(t2, f2), pts)
    M1 = projQ(t1, f1)
    R = rotQ(a)
    RM = [[R[i][0] * M1[0][j] + R[i][1] * M1[1][j] for j in range(3)] for i in range(2)]
    inner = _shadow(RM, pts)
    return inner, outer


def _rational_solid(poly):
    from .exclusion.rational import RationalSolid
    cache = poly.__dict__.setdefault("_rational_solid", {})
    if 16 not in cache:
        cache[16] = RationalSolid(poly, 16)
    return cache[16]


def certify_solution(poly, sol: RupertSolution, slack=SLACK) -> bool:
    """Exact certificate that nu * R(a) M(t1, f1) P lies strictly inside M(t2, f2) P."""
    solid = _rational_solid(poly)
    inner, outer = _shadows(solid, sol)
    return _contained(inner, exact_hull(outer), sol.nu, slack)


def _contained(inner, hull, nu, slack):
    s2 = slack * slack
    m = len(hull)
    edges = []
    for k in range(m):
        a, b = hull[k], hull[(k + 1) % m]
        ex, ey = b[0] - a[0], b[1] - a[1]
        edges.append((a, ex, ey, ex * ex + ey * ey))
    for x, y in inner:
        px, py = nu * x, nu * y
        for a, ex, ey, l2 in edges:
            c = ex * (py - a[1]) - ey * (px - a[0])
            if c <= 0 or c * c <= s2 * l2:
                return False
    return True


def nieuwland_lower(poly, sol: RupertSolution, nu_max=2) -> mpq:
    """Largest certified scale on the 10^-4 grid (0 if nu = 1 fails)."""
    solid = _rational_solid(poly)
    inner, outer = _shadows(solid, sol)
    hull = exact_hull(outer)
    if not _contained(inner, hull, mpq(1), SLACK):
        return mpq(0)
    lo, hi = 0, int(to_q(nu_max - 1) / NU_RESOLUTION)
    if _contained(inner, hull, 1 + hi * NU_RESOLUTION, SLACK):
        return 1 + hi * NU_RESOLUTION
    while hi - lo > 1:  # invariant: lo certified, hi not
        mid = (lo + hi) // 2
        if _contained(inner, hull, 1 + mid * NU_RESOLUTION, SLACK):
            lo = mid
        else:
            hi = mid
    return 1 + lo * NU_RESOLUTION


# -- float search ------------------------------------------------------------

def scale_ratio(V, psi) -> float:
    """Largest s with s * inner shadow inside the outer shadow (floats)."""
    t1, f1, t2, f2, a = psi
    inner = V @ (geo.rot2(a) @ geo.projection(t1, f1)).T
    outer = V @ geo.projection(t2, f2).T
    try:
        hull = ConvexHull(outer)
    except QhullError:
        return 0.0
    normals = hull.equations[:, :2]
    h_out = -hull.equations[:, 2]
    h_in = (inner @ normals.T).max(axis=0)
    with np.errstate(divide="ignore"):
        r = np.where(h_in > 0, h_out / h_in, np.inf)
    return float(r.min())


@dataclass
class SearchConfig:
    starts: int = 200
    seed: int = 0
    digits: int = 4
    max_iter: int = 400
    min_ratio: float = 1.0 + 1e-7


def _box_for(poly):
    if poly.symmetry is not None:
        return np.array([[0, 2 * math.pi / 15], [0, math.pi], [0, 2 * math.pi / 15], [0, math.pi / 2],
                         [-math.pi / 2, math.pi / 2]])
    return np.array([[0, 2 * math.pi], [0, math.pi], [0, 2 * math.pi], [0, math.pi], [-math.pi / 2, math.pi / 2]])


def search_solution(poly, cfg: SearchConfig | None = None):
    """Random starts + Nelder-Mead on the scale ratio, then exact certification.

    Returns the first certified RupertSolution (with its certified
    Nieuwland lower bound as ``nu``) or None.
    """
    cfg = cfg or SearchConfig()
    V = poly.vertices
    box = _box_for(poly)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.starts):
        x0 = box[:, 0] + rng.random(5) * (box[:, 1] - box[:, 0])
        if scale_ratio(V, x0) < 0.8:
            continue
        res = minimize(lambda x: -scale_ratio(V, x), x0, method="Nelder-Mead",
                       options={"maxiter": cfg.max_iter, "xatol": 1e-7, "fatol": 1e-9})
        if -res.fun < cfg.min_ratio:
            continue
        x = [math.remainder(v, 2 * math.pi) for v in res.x]
        q = 10**cfg.digits
        sol = RupertSolution.make([mpq(round(v * q), q) for v in x])
        if any(abs(a) > TRIG_DOMAIN for a in sol.angles()):
            continue
        if certify_solution(poly, sol):
            return sol.scaled(nieuwland_lower(poly, sol))
    return None


# -- export ------------------------------------------------------------

def projection_layers(poly, theta, phi, alpha=None, inner=None):
    """Points of the outer shadow, its hull (closed polyline) and optional inner shadow.

    ``inner = (theta1, phi1)`` adds the inner shadow R(alpha) M(theta1, phi1) P.
    Without ``inner``, ``alpha`` rotates the outer shadow.
    """
    V = poly.vertices
    a = 0.0 if alpha is None else float(alpha)
    M = geo.projection(float(theta), float(phi))
    if inner is None and alpha is not None:
        M = geo.rot2(a) @ M
    outer = V @ M.T
    hull = outer[ConvexHull(outer).vertices]
    layers = {"outer": outer, "hull": np.vstack([hull, hull[:1]])}
    if inner is not None:
        layers["inner"] = V @ (geo.rot2(a) @ geo.projection(float(inner[0]), float(inner[1]))).T
    return layers


def _fmt(x) -> str:
    v = float(x)
    return "0" if abs(v) < 5e-13 else f"{v:.12g}"


def export_projection(poly, theta, phi, alpha=None, fmt="csv", out=None, inner=None) -> str:
    """Render a shadow as CSV (``x,y,layer``) or static SVG; returns the text."""
    layers = projection_layers(poly, theta, phi, alpha, inner)
    if fmt == "csv":
        lines = ["x,y,layer"]
        for name in ("inner", "outer", "hull"):
            for x, y in layers.get(name, ()):
                lines.append(f"{_fmt(x)},{_fmt(y)},{name}")
        text = "\n".join(lines) + "\n"
    elif fmt == "svg":
        text = _svg(layers)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text)
    return text


def _svg(layers, size=400):
    pts = np.vstack(list(layers.values()))
    r = float(np.abs(pts).max()) * 1.1 or 1.0
    s = size / (2 * r)
    tx = lambda p: (_fmt(size / 2 + s * p[0]), _fmt(size / 2 - s * p[1]))  # noqa: E731
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    poly = " ".join(",".join(tx(p)) for p in layers["hull"])
    out.append(f'<polyline points="{poly}" fill="none" stroke="black" stroke-width="1"/>')
    colors = {"outer": "black", "inner": "red"}
    for name in ("outer", "inner"):
        for p in layers.get(name, ()):
            x, y = tx(p)
            out.append(f'<circle cx="{x}" cy="{y}" r="2" fill="{colors[name]}" data-x="{_fmt(p[0])}" '
                       f'data-y="{_fmt(p[1])}" class="{name}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
