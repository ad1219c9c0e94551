"""The polyhedra: Noperthedron, Ruperthedron and two reference solids.

Orbit solids are generated by three rational seed points ``C_1, C_2, C_3``
under the group C30 = {(-1)^l R_z(2 pi k/15)}.  Vertex ``k + 15 i + 45 l``
is ``(-1)^l R_z(2 pi k/15) C_(i+1)``.  Each vertex is available as a double,
as an exact element of Q(zeta_60), and truncated to a decimal rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np
from gmpy2 import mpq, mpz

from . import geometry
from .certtree import DEFAULT_DENOMINATOR, Region5
from .cyclo import CycloReal, cyclo_det3, cyclo_dot, cyclo_from_vertex
from .exact import KAPPA, sqrt_upper
from .pi import ceil_pi_multiple, floor_pi_multiple

C30 = "C30"


class Polyhedron:
    """A point-symmetric polyhedron given by its vertices.

    Pass either ``generators`` (three rational triples, C30 orbit) or
    ``points`` (literal rational triples).
    """

    def __init__(self, name, generators=None, points=None):
        if (generators is None) == (points is None):
            raise ValueError("give exactly one of generators or points")
        self.name = name
        if generators is not None:
            self.generators = tuple(tuple(mpq(c) for c in g) for g in generators)
            self.points = None
            self.symmetry = C30
            self.n = 30 * len(self.generators)
        else:
            self.generators = None
            self.points = tuple(tuple(mpq(c) for c in p) for p in points)
            self.symmetry = None
            self.n = len(self.points)
        self._gram_cache = {}

    def __repr__(self):
        return f"Polyhedron({self.name!r}, {self.n} vertices)"

    # -- indexing ------------------------------------------------------------

    def orbit_of(self, idx: int):
        """Vertex index -> (i, k, l)."""
        if self.symmetry != C30:
            raise ValueError(f"{self.name} is not an orbit solid")
        g = len(self.generators)
        l, rest = divmod(idx, 15 * g)
        i, k = divmod(rest, 15)
        return i, k, l

    def index_of(self, i: int, k: int, l: int) -> int:
        return (k % 15) + 15 * i + 15 * len(self.generators) * (l % 2)

    def negated(self, idx: int) -> int:
        """Index of the vertex ``-P_idx``."""
        if self.symmetry == C30:
            i, k, l = self.orbit_of(idx)
            return self.index_of(i, k, l + 1)
        return self._negation_table[idx]

    @cached_property
    def _negation_table(self):
        lookup = {p: j for j, p in enumerate(self.points)}
        out = []
        for p in self.points:
            q = tuple(-c for c in p)
            if q not in lookup:
                raise ValueError(f"{self.name} is not point-symmetric")
            out.append(lookup[q])
        return out

    # -- materializations ----------------------------------------------------

    def exact_vertex(self, idx: int):
        """Coordinates as CycloReal values (exact)."""
        if self.symmetry == C30:
            return cyclo_from_vertex(self.generators, *self.orbit_of(idx))
        return tuple(CycloReal.rational(c) for c in self.points[idx])

    def hp_vertex(self, idx: int, dps: int = 60):
        """Coordinates as mpmath floats with ``dps`` digits."""
        with mpmath.workdps(dps):
            if self.symmetry != C30:
                return tuple(mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in self.points[idx])
            i, k, l = self.orbit_of(idx)
            x, y, z = (mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in self.generators[i])
            a = 2 * mpmath.pi * k / 15
            c, s = mpmath.cos(a), mpmath.sin(a)
            v = (c * x - s * y, s * x + c * y, z)
            return tuple(-t for t in v) if l else v

    @cached_property
    def vertices(self) -> np.ndarray:
        """Double-precision vertex array of shape (n, 3)."""
        return np.array([[float(t) for t in self.hp_vertex(j, 30)] for j in range(self.n)])

    def truncated(self, digits: int = 16):
        """``floor(10^digits * P) / 10^digits`` for every vertex, as mpq triples."""
        return [tuple(mpq(x, 10**digits) for x in row) for row in self.truncated_numerators(digits)]

    def truncated_numerators(self, digits: int = 16):
        if digits < 11:
            raise ValueError("truncation needs at least 11 digits to stay within kappa")
        cache = self.__dict__.setdefault("_trunc", {})
        if digits not in cache:
            cache[digits] = tuple(
                tuple(self._floor_coordinate(j, c, digits) for c in range(3)) for j in range(self.n)
            )
        return cache[digits]

    def _floor_coordinate(self, idx, coord, digits):
        scale = mpz(10) ** digits
        if self.symmetry != C30:
            q = self.points[idx][coord] * scale
            return int(mpz(q.numerator) // mpz(q.denominator))
        with mpmath.workdps(80):
            v = self.hp_vertex(idx, 80)[coord] * int(scale)
            m = int(mpmath.floor(v))
            frac = v - m
            if mpmath.mpf(10) ** -40 < frac < 1 - mpmath.mpf(10) ** -40:
                return m
            # too close to a grid point for the enclosure: decide exactly
            cand = int(mpmath.nint(v))
            if self.exact_vertex(idx)[coord] == CycloReal.rational(mpq(cand, scale)):
                return cand
            raise ArithmeticError("cannot decide truncation of an algebraic coordinate")

    def truncation_error_ok(self, digits: int = 16) -> bool:
        """Check ``|P~ - P|^2 <= kappa^2`` for every vertex (60-digit enclosure)."""
        with mpmath.workdps(60):
            kap2 = (mpmath.mpf(int(KAPPA.numerator)) / int(KAPPA.denominator)) ** 2
            for j, row in enumerate(self.truncated_numerators(digits)):
                true = self.hp_vertex(j, 60)
                err = sum((mpmath.mpf(int(a)) / 10**digits - t) ** 2 for a, t in zip(row, true))
                if err > kap2:
                    return False
        return True

    # -- exact invariants ----------------------------------------------------

    def gram(self, a: int, b: int) -> CycloReal:
        """Exact scalar product of vertices ``a`` and ``b``."""
        if self.symmetry == C30:
            ia, ka, la = self.orbit_of(a)
            ib, kb, lb = self.orbit_of(b)
            key = (ia, ib, (kb - ka) % 15)
            if key not in self._gram_cache:
                u = cyclo_from_vertex(self.generators, ia, 0, 0)
                v = cyclo_from_vertex(self.generators, ib, (kb - ka) % 15, 0)
                self._gram_cache[key] = cyclo_dot(u, v)
            g = self._gram_cache[key]
            return -g if (la + lb) % 2 else g
        key = (min(a, b), max(a, b))
        if key not in self._gram_cache:
            self._gram_cache[key] = CycloReal.rational(
                sum((x * y for x, y in zip(self.points[a], self.points[b])), mpq(0)))
        return self._gram_cache[key]

    def det3(self, idx) -> CycloReal:
        return cyclo_det3([self.exact_vertex(j) for j in idx])

    def squared_norms(self):
        """Exact squared norms of the generators (orbit solids) or points."""
        pts = self.generators if self.symmetry == C30 else self.points
        return [sum((c * c for c in p), mpq(0)) for p in pts]

    @cached_property
    def radius_bound(self) -> mpq:
        r2 = max(self.squared_norms())
        return mpq(1) if r2 <= 1 else sqrt_upper(r2)

    def is_point_symmetric(self) -> bool:
        if self.symmetry == C30:
            return True
        try:
            self._negation_table
        except ValueError:
            return False
        return True


# -- the concrete solids -----------------------------------------------------

def noperthedron() -> Polyhedron:
    return Polyhedron("noperthedron", generators=[
        (mpq(152024884, 259375205), mpq(0), mpq(210152163, 259375205)),
        (mpq(6632738028, 10**10), mpq(6106948881, 10**10), mpq(3980949609, 10**10)),
        (mpq(8193990033, 10**10), mpq(5298215096, 10**10), mpq(1230614493, 10**10)),
    ])


def ruperthedron() -> Polyhedron:
    return Polyhedron("ruperthedron", generators=[
        (mpq(3939, 5861), mpq(0), mpq(4340, 5861)),
        (mpq(7855, 10**4), mpq(4178, 10**4), mpq(4484, 10**4)),
        (mpq(9526, 10**4), mpq(2057, 10**4), mpq(1102, 10**4)),
    ])


def octahedron() -> Polyhedron:
    # O1, O2, O3 are the vertices with nonnegative coordinates, O_(7-i) = -O_i
    e = [(0, 0, 1), (1, 0, 0), (0, 1, 0)]
    pts = e + [tuple(-c for c in v) for v in (e[1], e[2], e[0])]
    return Polyhedron("octahedron", points=pts)


def cube() -> Polyhedron:
    # half-unit coordinates keep every vertex inside the unit ball
    h = mpq(1, 2)
    signs = [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)]
    pts = [tuple(h * s for s in sg) for sg in signs]
    pts += [tuple(-c for c in p) for p in pts]
    return Polyhedron("cube", points=pts)


SOLIDS = {
    "noperthedron": noperthedron,
    "ruperthedron": ruperthedron,
    "cube": cube,
    "octahedron": octahedron,
}
_CACHE = {}


def get_solid(name: str) -> Polyhedron:
    """Solid from the registry (instances are shared)."""
    if name not in SOLIDS:
        raise KeyError(f"unknown solid {name!r}; known: {', '.join(SOLIDS)}")
    if name not in _CACHE:
        _CACHE[name] = SOLIDS[name]()
    return _CACHE[name]


def reference_solid(name: str) -> Polyhedron:
    if name not in ("cube", "octahedron"):
        raise KeyError(f"unknown reference solid {name!r}")
    return get_solid(name)


def load_vertex_file(path, name=None) -> Polyhedron:
    """Read one rational triple per line (``1/2 -3/4 0``, ``#`` comments)."""
    pts = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 3:
                raise ValueError(f"expected three coordinates per line: {line!r}")
            pts.append(tuple(mpq(Fraction(p)) for p in parts))
    return Polyhedron(name or str(path), points=pts)


# -- search regions ----------------------------------------------------------

# bounds as multiples of pi: (T1, V1, T2, V2, A) lower/upper
REDUCED_BOX = ((0, mpq(2, 15)), (0, 1), (0, mpq(2, 15)), (0, mpq(1, 2)), (mpq(-1, 2), mpq(1, 2)))
FULL_BOX = ((0, 2), (0, 1), (0, 2), (0, 1), (mpq(-1, 2), mpq(1, 2)))


@dataclass(frozen=True)
class InitialRegion:
    """A search box whose real bounds are rational multiples of pi.

    ``box`` is the smallest integer box over ``denominator`` containing it.
    """

    pi_bounds: tuple
    denominator: int
    box: Region5


def pi_box(pi_bounds, denominator: int = DEFAULT_DENOMINATOR) -> InitialRegion:
    lo = [floor_pi_multiple(a, denominator) for a, _ in pi_bounds]
    hi = [ceil_pi_multiple(b, denominator) for _, b in pi_bounds]
    return InitialRegion(tuple((mpq(a), mpq(b)) for a, b in pi_bounds), denominator, Region5(lo, hi))


def initial_region(p: Polyhedron, denominator: int = DEFAULT_DENOMINATOR) -> InitialRegion:
    return pi_box(REDUCED_BOX if p.symmetry == C30 else FULL_BOX, denominator)


def alpha_slab(p: Polyhedron, lo, hi, denominator: int = DEFAULT_DENOMINATOR) -> InitialRegion:
    """The initial region with alpha restricted to ``[lo*pi, hi*pi]``."""
    base = REDUCED_BOX if p.symmetry == C30 else FULL_BOX
    return pi_box(base[:4] + ((mpq(lo), mpq(hi)),), denominator)


# -- symmetries ----------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryEvidence:
    theta_shift: tuple   # M(t + 2pi/15, f) P_j = M(t, f) P_perm[j]
    alpha_shift: tuple   # R(a + pi) M P_j = R(a) M P_perm[j]
    mirror: tuple        # diag(1,-1) M(t, f) P_j = M(t + pi/15, pi - f) P_perm[j]


def symmetry_orbit_images(p: Polyhedron, theta: float, phi: float, alpha: float = 0.0,
                          tol: float = 1e-9) -> SymmetryEvidence:
    """Vertex permutations realizing the three C30 shadow identities.

    The permutations come from the group action; each is then checked
    numerically on the projected points.
    """
    if p.symmetry != C30:
        raise ValueError(f"{p.name} has no C30 symmetry descriptor")
    V = p.vertices
    idx = [p.orbit_of(j) for j in range(p.n)]
    shift = tuple(p.index_of(i, k - 1, l) for i, k, l in idx)
    neg = tuple(p.index_of(i, k, l + 1) for i, k, l in idx)
    mirror = tuple(p.index_of(i, k + 8, l + 1) for i, k, l in idx)  # -R_z(16 pi/15)

    M = geometry.projection(theta, phi)
    ok1 = np.abs(geometry.projection(theta + 2 * np.pi / 15, phi) @ V.T - M @ V[list(shift)].T).max()
    R = geometry.rot2(alpha)
    ok2 = np.abs(geometry.rot2(alpha + np.pi) @ M @ V.T - R @ M @ V[list(neg)].T).max()
    D = np.diag([1.0, -1.0])
    M3 = geometry.projection(theta + np.pi / 15, np.pi - phi)
    ok3 = np.abs(D @ M @ V.T - M3 @ V[list(mirror)].T).max()
    for name, err in (("theta shift", ok1), ("alpha shift", ok2), ("mirror", ok3)):
        if err > tol:
            raise ArithmeticError(f"symmetry identity ({name}) fails: residual {err:.3g}")
    return SymmetryEvidence(shift, neg, mirror)
