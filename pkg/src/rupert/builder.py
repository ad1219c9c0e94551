"""Floating-point divide-and-conquer construction of certificate trees.

Each region is handled in the order: global theorem, local theorem, split.
Regions are processed breadth-first in fixed-size batches; a node's
children receive consecutive IDs at the moment the node is split, so the
table is identical from run to run.  No decision about one region depends
on the outcome of another.

Every witness emitted here has passed the float checker with the rational
constants (kappa, 1.42, 2.24) and a relative safety margin.  Soundness is
still the verifier's business.
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from .certtree import (DEFAULT_DENOMINATOR, GLOBAL, INTERIOR, LOCAL, SPLIT_ALL, CertNode, CertTree,
                       Region5, write_csv)
from .exclusion.floating import (DEFAULT_MARGIN, KAPPA, Constants, b_lhs_matrix, global_check_float,
                                 local_check_float)
from .exclusion.types import GlobalWitness, LocalWitness, R_DENOMINATOR

W_DENOM_SCALE = 10**6
_NONE = np.iinfo(np.int64).min


class BuildError(RuntimeError):
    """The build could not resolve a region (no unsound tree is emitted)."""


@dataclass
class BuildConfig:
    max_depth: int = 40
    margin: float = DEFAULT_MARGIN
    denominator: int = DEFAULT_DENOMINATOR
    threads: int = 1
    batch: int = 256
    n_directions: int = 64
    coarse_width: float = 0.2      # wider dimensions are cut into several strips at once
    local_max_eps: float = 0.08    # only try the local theorem below this half-width
    local_max_delta: float = 0.1
    progress: bool = False
    max_nodes: int | None = None


# -- batched matrices ------------------------------------------------------------

def _proj(t, f):
    st, ct, sf, cf = np.sin(t), np.cos(t), np.sin(f), np.cos(f)
    z = np.zeros_like(t)
    M = np.stack([np.stack([-st, ct, z], -1), np.stack([-ct * cf, -st * cf, sf], -1)], -2)
    Mt = np.stack([np.stack([-ct, -st, z], -1), np.stack([st * cf, -ct * cf, z], -1)], -2)
    Mf = np.stack([np.stack([z, z, z], -1), np.stack([ct * sf, st * sf, cf], -1)], -2)
    X = np.stack([ct * sf, st * sf, cf], -1)
    return M, Mt, Mf, X


def _rot(a):
    s, c = np.sin(a), np.cos(a)
    R = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    Rd = np.stack([np.stack([-s, -c], -1), np.stack([c, -s], -1)], -2)
    return R, Rd


class ShadowBatch:
    """Projected vertex data for a batch of region centers."""

    def __init__(self, V, centers, eps):
        c = np.asarray(centers, dtype=float).reshape(-1, 5)
        self.eps = np.asarray(eps, dtype=float).reshape(-1)
        M1, M1t, M1f, self.X1 = _proj(c[:, 0], c[:, 1])
        M2, M2t, M2f, self.X2 = _proj(c[:, 2], c[:, 3])
        R, Rd = _rot(c[:, 4])
        self.V = V
        nv = len(V)
        self.nv = nv
        # inner shadow and its alpha/theta1/phi1 derivative images, then the
        # outer shadow and its theta2/phi2 derivatives, stacked as (n, k*nv, 2)
        mats = [R @ M1, Rd @ M1, R @ M1t, R @ M1f]
        self.A = np.concatenate([V @ m.transpose(0, 2, 1) for m in mats], axis=1)
        self.B = np.concatenate([V @ m.transpose(0, 2, 1) for m in (M2, M2t, M2f)], axis=1)
        self.M1, self.M2, self.R = M1, M2, R

    def part(self, name):
        nv = self.nv
        k = {"A0": 0, "Aa": 1, "At": 2, "Af": 3}.get(name)
        if k is not None:
            return self.A[:, k * nv:(k + 1) * nv]
        k = {"B0": 0, "Bt": 1, "Bf": 2}[name]
        return self.B[:, k * nv:(k + 1) * nv]

    def gap(self, W, kappa=0.0, rows=None):
        """max_S G - max_P H for directions ``W`` of shape (n, K, 2) or (K, 2).

        Returns ``(gap, best_S)`` with shape (n, K).
        """
        sl = slice(None) if rows is None else rows
        nv = self.nv
        eq = self.eps[sl][:, None]
        e = eq[:, :, None]
        Wt = W.T if W.ndim == 2 else W.transpose(0, 2, 1)
        GA = self.A[sl] @ Wt
        HB = self.B[sl] @ Wt
        np.abs(GA[:, nv:], out=GA[:, nv:])
        np.abs(HB[:, nv:], out=HB[:, nv:])
        G = GA[:, :nv] - e * (GA[:, nv:2 * nv] + GA[:, 2 * nv:3 * nv] + GA[:, 3 * nv:])
        H = HB[:, :nv] + e * (HB[:, nv:2 * nv] + HB[:, 2 * nv:])
        s = G.argmax(axis=1)
        g = np.take_along_axis(G, s[:, None, :], 1)[:, 0, :] - 4.5 * eq * eq - 4 * kappa * (1 + 3 * eq)
        h = H.max(axis=1) + 2 * eq * eq + 3 * kappa * (1 + 2 * eq)
        return g - h, s

    def symmetry_mismatch(self, perms):
        """min over symmetries g of max_j |R M1 g^-1 P_j - M2 P_j| per region."""
        inner, outer = self.part("A0"), self.part("B0")
        best = np.full(len(self.eps), np.inf)
        for perm in perms:
            inv = np.empty_like(perm)
            inv[perm] = np.arange(len(perm))
            d = np.sqrt(((inner[:, inv] - outer) ** 2).sum(-1)).max(axis=1)
            np.minimum(best, d, out=best)
        return best

    def nearest_mismatch(self, rows=None):
        """max over outer points of the distance to the nearest inner point."""
        sl = slice(None) if rows is None else rows
        inner, outer = self.part("A0")[sl], self.part("B0")[sl]
        d2 = ((outer[:, :, None, :] - inner[:, None, :, :]) ** 2).sum(-1)
        return np.sqrt(d2.min(axis=2).max(axis=1))


# -- rational unit vectors ------------------------------------------------------------

def rational_unit_vector(psi: float, q: int = W_DENOM_SCALE):
    """Exact rational unit vector close to ``(cos psi, sin psi)``.

    Uses t = tan(psi/2) rounded to a multiple of 1/q, so that
    w = ((q^2 - p^2), 2pq) / (q^2 + p^2) has |w| = 1 exactly.  Angles with
    |psi| > pi/2 are handled through w -> -w to keep t small.
    """
    psi = math.remainder(psi, 2 * math.pi)
    flip = abs(psi) > math.pi / 2
    if flip:
        psi = psi - math.copysign(math.pi, psi)
    p = round(math.tan(psi / 2) * q)
    wx, wy, wd = q * q - p * p, 2 * p * q, q * q + p * p
    g = math.gcd(math.gcd(wx, wy), wd)
    wx, wy, wd = wx // g, wy // g, wd // g
    if flip:
        wx, wy = -wx, -wy
    return wx, wy, wd


# -- global witnesses ------------------------------------------------------------

def _refine_directions(batch, psi, rows, spans, steps=8):
    best_gap = None
    best = psi
    for span in spans:
        offs = np.linspace(-span, span, 2 * steps + 1)
        cand = best[:, None] + offs[None, :]
        W = np.stack([np.cos(cand), np.sin(cand)], -1)
        g, _ = batch.gap(W, rows=rows)
        k = g.argmax(axis=1)
        best = np.take_along_axis(cand, k[:, None], 1)[:, 0]
        best_gap = np.take_along_axis(g, k[:, None], 1)[:, 0]
    return best, best_gap


def batch_global_witnesses(V, centers, eps, cfg: BuildConfig, batch: ShadowBatch | None = None):
    """Try the global theorem on many regions at once.

    Returns ``(witnesses, best_gap)``: a list with a GlobalWitness or None
    per region, and the best float gap found (for split heuristics).
    """
    if batch is None:
        batch = ShadowBatch(V, centers, eps)
    n = len(batch.eps)
    K = cfg.n_directions
    psis = 2 * np.pi * np.arange(K) / K
    W = np.stack([np.cos(psis), np.sin(psis)], -1)
    g, _ = batch.gap(W)
    k = g.argmax(axis=1)
    coarse = g[np.arange(n), k]
    out = [None] * n
    # refine only where a positive gap is plausible on a finer direction grid
    rows = np.nonzero(coarse > -0.05)[0]
    best_gap = coarse.copy()
    if len(rows):
        step = 2 * np.pi / K
        psi, gap = _refine_directions(batch, psis[k[rows]], rows, (step, step / 8, step / 64))
        best_gap[rows] = gap
        pos = np.nonzero(gap > 0)[0]
        if len(pos):
            ws = [rational_unit_vector(float(psi[j])) for j in pos]
            W = np.array([[[wx / wd, wy / wd]] for wx, wy, wd in ws])
            gg, ss = batch.gap(W, kappa=KAPPA, rows=rows[pos])
            for t, j in enumerate(pos):
                if gg[t, 0] > cfg.margin * 2:
                    out[rows[j]] = GlobalWitness(int(ss[t, 0]), *ws[t])
    return out, best_gap


def propose_global_witness(poly, center, eps: float = 0.0, cfg: BuildConfig | None = None):
    """A global witness for the box of half-width ``eps`` around ``center``.

    With ``eps = 0`` this is a witness that the inner shadow at the center
    is not contained in the outer one.  Returns None if none is found.
    """
    cfg = cfg or BuildConfig()
    V = poly.vertices
    wits, _ = batch_global_witnesses(V, [center], [eps], cfg)
    w = wits[0]
    if w is None:
        return None
    if global_check_float(V, center, eps, w, margin=cfg.margin, rational_safe=True).excluded:
        return w
    return None


# -- symmetry group as vertex permutations ------------------------------------------------------------

def symmetry_permutations(poly):
    """Vertex permutations induced by linear symmetries of ``poly``.

    ``perm[j]`` is the index of ``g P_j``.  Orbit solids use the C30 action
    on indices; literal solids use the signed permutation matrices that map
    the vertex set onto itself.
    """
    cache = poly.__dict__.get("_sym_perms")
    if cache is not None:
        return cache
    perms = []
    if poly.symmetry is not None:
        idx = [poly.orbit_of(j) for j in range(poly.n)]
        for l2 in (0, 1):
            for k2 in range(15):
                perms.append(np.array([poly.index_of(i, k + k2, l + l2) for i, k, l in idx]))
    else:
        lookup = {p: j for j, p in enumerate(poly.points)}
        for perm in itertools.permutations(range(3)):
            for signs in itertools.product((1, -1), repeat=3):
                img = []
                for p in poly.points:
                    q = tuple(signs[a] * p[perm[a]] for a in range(3))
                    if q not in lookup:
                        break
                    img.append(lookup[q])
                else:
                    perms.append(np.array(img))
    poly.__dict__["_sym_perms"] = perms
    return perms


# -- local witnesses ------------------------------------------------------------

def _local_candidates(V, c, eps, inv, cfg, const, gram=None):
    """Best local witness for the matching ``P = inv[Q]`` or None.

    ``inv`` comes from a symmetry (every triple is congruent) or, when
    ``gram`` is given, from nearest shadow points; then only triples whose
    Gram matrices agree are kept.
    """
    t1, f1, t2, f2, a = c
    M1, _, _, X1 = _proj(np.array(t1), np.array(f1))
    M2, _, _, X2 = _proj(np.array(t2), np.array(f2))
    R, _ = _rot(np.array(a))
    Y1 = V @ (R @ M1).T
    Y2 = V @ M2.T
    k = const.kappa
    thr_a = const.sqrt2 * eps + 3 * k
    thr_s = 2 * eps * (const.sqrt2 + eps) + 6 * k
    half_dist = np.linalg.norm(Y1[inv] - Y2, axis=1) / 2  # |R M1 P_i - M2 Q_i| / 2 with P = g^-1 Q
    hx1 = V[inv] @ X1
    hx2 = V @ X2
    norms = np.linalg.norm(Y2, axis=1)
    ok = (hx1 > thr_a * (1 + 1e-6) + 1e-9) & (np.abs(hx2) > thr_a * (1 + 1e-6) + 1e-9)
    ok &= half_dist < cfg.local_max_delta
    ok &= norms > const.sqrt2 * eps + 3 * k + 1e-3
    cand = np.nonzero(ok)[0]
    if len(cand) < 3:
        return None
    lhs = b_lhs_matrix(V, Y2, eps, const, rows=cand).min(axis=1)
    keep = lhs > 0
    cand, lhs = cand[keep], lhs[keep]
    if len(cand) < 3:
        return None
    if len(cand) > 40:
        order = np.argsort(-lhs)[:40]
        cand, lhs = cand[order], lhs[order]
    best = None
    for sigma in (0, 1):
        sel = (hx2[cand] < 0) if sigma else (hx2[cand] > 0)
        cs, ls = cand[sel], lhs[sel]
        if len(cs) < 3:
            continue
        tri = np.array(list(itertools.combinations(range(len(cs)), 3)))
        for order in ((0, 1, 2), (0, 2, 1)):
            T = tri[:, order]
            qi = cs[T]
            pi = inv[qi]
            yq, yp = Y2[qi], Y1[pi]
            cross = lambda Y: np.stack([Y[:, 0, 0] * Y[:, 1, 1] - Y[:, 0, 1] * Y[:, 1, 0],
                                        Y[:, 1, 0] * Y[:, 2, 1] - Y[:, 1, 1] * Y[:, 2, 0],
                                        Y[:, 2, 0] * Y[:, 0, 1] - Y[:, 2, 1] * Y[:, 0, 0]], 1).min(1)
            good = (cross(yq) > thr_s * (1 + 1e-5)) & (cross(yp) > thr_s * (1 + 1e-5))
            if gram is not None and good.any():
                pairs = ((0, 1), (1, 2), (0, 2))
                dev = np.max([np.abs(gram[pi[:, u], pi[:, v]] - gram[qi[:, u], qi[:, v]]) for u, v in pairs], 0)
                good &= dev < 1e-9
            if not good.any():
                continue
            qi, pi, yq = qi[good], pi[good], yq[good]
            delta = half_dist[qi].max(axis=1) + 3 * k
            rmax = norms[qi].min(axis=1) - const.sqrt2 * eps - 3 * k
            r = np.floor(rmax * R_DENOMINATOR * (1 - 1e-6)) / R_DENOMINATOR
            lmin = ls[T[good]].min(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                score = lmin - (np.sqrt(5.0) * 1.0018 * eps + delta) / r  # 2.24 > sqrt 5
            score[r <= 0] = -np.inf
            j = int(score.argmax())
            if best is None or score[j] > best[0]:
                best = (float(score[j]), tuple(int(x) for x in pi[j]), tuple(int(x) for x in qi[j]),
                        int(round(r[j] * R_DENOMINATOR)), sigma)
    return best


def propose_local_witness(poly, center, eps: float, cfg: BuildConfig | None = None,
                          max_symmetries: int = 4, nearest: bool = True):
    """A local witness (P, Q = gP, r, sigma_Q) for the box or None.

    The symmetry ``g`` is chosen among those whose induced matching of
    inner and outer shadows is closest; P is always on the visible side of
    X1 (sigma_P = 0).
    """
    cfg = cfg or BuildConfig()
    V = poly.vertices
    c = tuple(float(x) for x in center)
    perms = symmetry_permutations(poly)
    t1, f1, t2, f2, a = c
    M1, _, _, _ = _proj(np.array(t1), np.array(f1))
    M2, _, _, _ = _proj(np.array(t2), np.array(f2))
    R, _ = _rot(np.array(a))
    Y1, Y2 = V @ (R @ M1).T, V @ M2.T
    # rank symmetries by how well g^-1 matches the shadows
    invs, mism = [], []
    for perm in perms:
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        invs.append(inv)
        mism.append(np.linalg.norm(Y1[inv] - Y2, axis=1).max())
    order = np.argsort(mism, kind="stable")[:max_symmetries]
    const = Constants.choose(True)
    found = []
    for gi in order:
        if mism[gi] / 2 > cfg.local_max_delta:
            break
        best = _local_candidates(V, c, eps, invs[gi], cfg, const)
        if best is not None and best[0] > 0:
            found.append(best)
    if not found and nearest:
        # shadows can also coincide without a symmetry of the solid, e.g.
        # mirrored views of a regular hull; match nearest shadow points
        d2 = ((Y2[:, None, :] - Y1[None, :, :]) ** 2).sum(-1)
        best = _local_candidates(V, c, eps, d2.argmin(axis=1), cfg, const, gram=V @ V.T)
        if best is not None and best[0] > 0:
            found.append(best)
    found.sort(key=lambda b: -b[0])
    for _, p, q, r, sigma in found:
        wit = LocalWitness(p, q, r, sigma)
        if local_check_float(V, c, eps, wit, margin=cfg.margin, rational_safe=True).excluded:
            return wit
    return None


# -- splitting ------------------------------------------------------------

def split_bounds(lo: int, hi: int, m: int):
    """``m`` closed sub-intervals of [lo, hi] with shared integer endpoints."""
    if hi - lo < 1:
        raise BuildError("interval of zero width cannot be split")
    m = min(m, hi - lo)
    cuts = [lo + (j * (hi - lo)) // m for j in range(m + 1)]
    return [(cuts[j], cuts[j + 1]) for j in range(m)]


def split_region(region: Region5, split: int, pieces: int = 2):
    """Children of ``region`` for split code 1-5 (one coordinate) or 6 (all)."""
    if all(w == 0 for w in region.widths()):
        raise BuildError("region cannot be split further")
    if split == SPLIT_ALL:
        halves = [split_bounds(a, b, 2) if b > a else [(a, b), (a, b)] for a, b in zip(region.lo, region.hi)]
        return [Region5(tuple(x[0] for x in combo), tuple(x[1] for x in combo))
                for combo in itertools.product(*halves)]
    if not 1 <= split <= 5:
        raise ValueError(f"split code must be in 1..6, got {split}")
    d = split - 1
    out = []
    for a, b in split_bounds(region.lo[d], region.hi[d], pieces):
        lo, hi = list(region.lo), list(region.hi)
        lo[d], hi[d] = a, b
        out.append(Region5(lo, hi))
    return out


def choose_split(widths, denominator, cfg: BuildConfig, weights=None):
    """(split code, pieces) for a region that could not be excluded.

    The theorems only see the largest half-width, so every split should
    shrink it: near-cubic boxes are halved in all coordinates at once, and
    a dominant coordinate is cut until it matches the next widest one.
    """
    raw = np.asarray(widths, dtype=np.int64)
    w = raw / denominator
    key = w * (1 + 1e-3 * (weights if weights is not None else 0))
    d = int(np.argmax(key))
    if raw[d] < 1:
        raise BuildError("region cannot be split further")
    if w[d] > cfg.coarse_width:
        return d + 1, min(30, int(math.ceil(w[d] / cfg.coarse_width)))
    if raw.min() >= 2 and w.min() * 2 >= w[d]:
        return SPLIT_ALL, 32
    second = np.sort(w)[-2]
    pieces = 2 if second <= 0 else int(w[d] // second)
    return d + 1, max(2, min(30, pieces))


# -- node table ------------------------------------------------------------

_FIELDS = ("id", "node_type", "n_children", "first_child", "split", "s_index", "wx", "wy", "wd",
           "p1", "p2", "p3", "q1", "q2", "q3", "r", "sigma_q")


class NodeTable:
    """Array-backed certificate tree (row i is node i)."""

    def __init__(self, capacity=1024):
        self.n = 0
        self.regions = np.zeros((capacity, 10), dtype=np.int64)
        self.fields = np.full((capacity, len(_FIELDS)), _NONE, dtype=np.int64)

    def _grow(self, need):
        cap = len(self.regions)
        if need <= cap:
            return
        new = max(need, 2 * cap)
        self.regions = np.concatenate([self.regions, np.zeros((new - cap, 10), dtype=np.int64)])
        self.fields = np.concatenate([self.fields, np.full((new - cap, len(_FIELDS)), _NONE, dtype=np.int64)])

    def add(self, region: Region5) -> int:
        self._grow(self.n + 1)
        i = self.n
        self.regions[i] = region.flat()
        self.fields[i, 0] = i
        self.n += 1
        return i

    def region(self, i) -> Region5:
        return Region5.from_flat(self.regions[i])

    def set(self, i, **kw):
        for k, v in kw.items():
            self.fields[i, _FIELDS.index(k)] = v

    def node(self, i) -> CertNode:
        f = [None if x == _NONE else int(x) for x in self.fields[i]]
        d = dict(zip(_FIELDS, f))
        p = tuple(d[k] for k in ("p1", "p2", "p3")) if d["p1"] is not None else None
        q = tuple(d[k] for k in ("q1", "q2", "q3")) if d["q1"] is not None else None
        return CertNode(id=d["id"], node_type=d["node_type"], region=self.region(i),
                        n_children=d["n_children"], first_child=d["first_child"], split=d["split"],
                        s_index=d["s_index"], wx=d["wx"], wy=d["wy"], wd=d["wd"],
                        p=p, q=q, r=d["r"], sigma_q=d["sigma_q"])

    def __len__(self):
        return self.n

    def __iter__(self):
        return (self.node(i) for i in range(self.n))

    def to_tree(self) -> CertTree:
        return CertTree(list(self))

    def write_csv(self, out, compress=None):
        write_csv(iter(self), out, compress)

    def stats(self):
        t = self.fields[: self.n, 1]
        return {"interior": int((t == INTERIOR).sum()), "leaves": int(((t == GLOBAL) | (t == LOCAL)).sum()),
                "global": int((t == GLOBAL).sum()), "local": int((t == LOCAL).sum())}


# -- the build loop ------------------------------------------------------------

def _derivative_weights(batch: ShadowBatch, row: int):
    """Size of each coordinate's first-derivative term (T1, V1, T2, V2, A)."""
    n = lambda name: np.abs(batch.part(name)[row]).max()  # noqa: E731
    return np.array([n("At"), n("Af"), n("Bt"), n("Bf"), n("Aa")])


def build_table(poly, root, cfg: BuildConfig | None = None) -> NodeTable:
    """Build a certificate tree for ``root`` (an InitialRegion or Region5)."""
    cfg = cfg or BuildConfig()
    N = cfg.denominator
    box = root.box if hasattr(root, "box") else root
    if any(abs(x) > 4 * N for x in box.flat()):
        raise BuildError("root bounds must lie within [-4, 4]")
    V = poly.vertices
    if np.linalg.norm(V, axis=1).max() > 1 + 1e-12:
        raise BuildError("vertices must have norm at most 1")
    table = NodeTable()
    table.add(box)
    depth = {0: 0}
    queue = [0]
    head = 0
    t0 = time.time()
    last = t0
    while head < len(queue):
        ids = queue[head: head + cfg.batch]
        head += len(ids)
        regs = table.regions[ids]
        lo, hi = regs[:, 0::2], regs[:, 1::2]
        centers = (lo + hi) / (2.0 * N)
        eps = (hi - lo).max(axis=1) / (2.0 * N)
        batch = ShadowBatch(V, centers, eps)
        wits, gaps = batch_global_witnesses(V, centers, eps, cfg, batch)
        todo = np.array([w is None for w in wits]) & (eps <= cfg.local_max_eps)
        mism = np.full(len(ids), np.inf)
        if todo.any():
            # the nearest-point mismatch never exceeds the symmetry one
            rows = np.nonzero(todo)[0]
            mism[rows] = batch.nearest_mismatch(rows)
        for j, nid in enumerate(ids):
            w = wits[j]
            if w is not None:
                table.set(nid, node_type=GLOBAL, s_index=w.s_index, wx=w.wx, wy=w.wy, wd=w.wd)
                continue
            if mism[j] / 2 < cfg.local_max_delta:
                lw = propose_local_witness(poly, centers[j], float(eps[j]), cfg)
                if lw is not None:
                    table.set(nid, node_type=LOCAL, p1=lw.p[0], p2=lw.p[1], p3=lw.p[2],
                              q1=lw.q[0], q2=lw.q[1], q3=lw.q[2], r=lw.r, sigma_q=lw.sigma_q)
                    continue
            dep = depth.pop(nid, 0)
            if dep >= cfg.max_depth:
                raise BuildError(f"depth limit {cfg.max_depth} reached at node {nid}, region {table.region(nid)}")
            region = table.region(nid)
            weights = _derivative_weights(batch, j)
            code, pieces = choose_split(region.widths(), N, cfg, weights)
            kids = split_region(region, code, pieces)
            first = table.n
            for kreg in kids:
                cid = table.add(kreg)
                depth[cid] = dep + 1
                queue.append(cid)
            table.set(nid, node_type=INTERIOR, n_children=len(kids), first_child=first, split=code)
        if cfg.max_nodes is not None and table.n > cfg.max_nodes:
            err = BuildError(f"node budget {cfg.max_nodes} exceeded")
            err.open_regions = [table.region(i) for i in queue[head:]]
            raise err
        if cfg.progress and time.time() - last > 5:
            last = time.time()
            st = table.stats()
            print(f"[build] {table.n} nodes, {len(queue) - head} open, {st['global']} global, "
                  f"{st['local']} local, {last - t0:.0f}s", file=sys.stderr, flush=True)
    return table


def build_tree(poly, root, cfg: BuildConfig | None = None) -> CertTree:
    return build_table(poly, root, cfg).to_tree()
