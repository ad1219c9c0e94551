"""Exact verification of certificate trees.

A tree proves that no Rupert solution exists in the target region when
(A) its leaves cover the target; this comes from the structural integrity
check, and (B) every leaf passes its rational theorem.  All arithmetic here
is exact.  Nothing in this module uses the builder's floating-point checks.
"""

from __future__ import annotations

import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .bandgrid import BandGrid
from .certtree import (DEFAULT_DENOMINATOR, GLOBAL, LOCAL, CertNode, DecodeError, IntegrityChecker,
                       IntegrityReport, iter_nodes, validate_node)
from .exact import TRIG_DOMAIN
from .pi import PI_HI
from .exclusion.rational import RationalSolid, global_check_rational, local_check_rational
from .exclusion.types import CheckResult, GlobalWitness, LocalWitness, Step, failed

CHUNK = 2000


def verify_leaf(solid: RationalSolid, node: CertNode, denominator: int = DEFAULT_DENOMINATOR) -> CheckResult:
    """Run the exact checks for one leaf, in the fixed step order."""
    region = node.region
    # step 1: midpoints in [-4, 4]
    center = region.center(denominator)
    if any(abs(c) > TRIG_DOMAIN for c in center):
        return failed(Step.DOMAIN, "midpoint outside [-4, 4]")
    # step 2: epsilon is recomputed from the region
    eps = region.epsilon(denominator)
    problems = validate_node(node, solid.n)
    if problems:
        return failed(Step.WITNESS, "; ".join(problems))
    if node.node_type == GLOBAL:
        wit = GlobalWitness(node.s_index, node.wx, node.wy, node.wd)
        return global_check_rational(solid, center, eps, wit)
    if node.node_type == LOCAL:
        wit = LocalWitness(tuple(node.p), tuple(node.q), node.r, node.sigma_q)
        return local_check_rational(solid, center, eps, wit)
    return failed(Step.WITNESS, f"node {node.id} is not a leaf")


@dataclass
class VerificationReport:
    integrity: IntegrityReport
    leaves_checked: int = 0
    leaves_total: int = 0
    failures: list = field(default_factory=list)  # (id, step, detail)
    sampled: bool = False
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.integrity.ok and not self.failures and self.leaves_checked == self.leaves_total > 0

    @property
    def sample_ok(self) -> bool:
        return self.integrity.ok and not self.failures and self.leaves_checked > 0

    def summary(self) -> str:
        i = self.integrity
        lines = [f"nodes: {i.n_nodes} (interior {i.n_interior}, global {i.n_global}, local {i.n_local})",
                 f"integrity: {'ok' if i.ok else f'{len(i.errors)} error(s)'}",
                 f"leaves checked: {self.leaves_checked}/{self.leaves_total}, failures: {len(self.failures)}"]
        for nid, code, msg in i.errors[:20]:
            lines.append(f"  integrity node {nid}: {code}: {msg}")
        for nid, step, detail in self.failures[:20]:
            lines.append(f"  leaf {nid}: {step}: {detail}")
        if self.sampled:
            lines.append("SAMPLE ONLY: a passing sample is not a proof")
        elif self.ok:
            lines.append("proof verified")
        else:
            lines.append("NOT verified")
        lines.append(f"time: {self.seconds:.1f}s")
        return "\n".join(lines)


_WORKER = {}


def _init_worker(poly, denominator):
    _WORKER["solid"] = RationalSolid(poly)
    _WORKER["den"] = denominator


def _check_chunk(nodes):
    solid, den = _WORKER["solid"], _WORKER["den"]
    out = []
    for node in nodes:
        res = verify_leaf(solid, node, den)
        out.append((node.id, res.excluded, res.step.value if res.step else "", res.detail))
    return out


def verify_tree(poly, tree_source, root_target=None, threads: int = 1, sample: int | None = None,
                report_path=None, denominator: int = DEFAULT_DENOMINATOR, seed: int = 0,
                progress: bool = False) -> VerificationReport:
    """Verify a tree given as nodes or a CSV source, in one streaming pass.

    ``root_target`` is the region the proof must cover (a Region5 or
    InitialRegion).  With ``sample`` only that many leaves, chosen
    deterministically, get the rational checks; integrity is always full.
    """
    t0 = time.time()
    target = getattr(root_target, "box", root_target)
    checker = IntegrityChecker(target)
    nodes = iter_nodes(tree_source) if not _is_node_iterable(tree_source) else iter(tree_source)
    rng = random.Random(seed)
    rep = VerificationReport(IntegrityReport())
    results = []
    pool = None
    pending = []
    if threads > 1:
        pool = ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(poly, denominator))
    else:
        _init_worker(poly, denominator)

    def flush(chunk):
        if pool is None:
            results.extend(_check_chunk(chunk))
        else:
            pending.append(pool.submit(_check_chunk, chunk))

    chunk = []
    reservoir = []
    seen = 0
    last = time.time()
    try:
        for node in nodes:
            checker.feed(node)
            if not node.is_leaf:
                continue
            seen += 1
            if sample is not None:
                if len(reservoir) < sample:
                    reservoir.append(node)
                else:
                    j = rng.randrange(seen)
                    if j < sample:
                        reservoir[j] = node
                continue
            chunk.append(node)
            if len(chunk) >= CHUNK:
                flush(chunk)
                chunk = []
                if progress and time.time() - last > 5:
                    last = time.time()
                    print(f"[verify] {seen} leaves read, {time.time() - t0:.0f}s", file=sys.stderr, flush=True)
        if sample is not None:
            chunk = sorted(reservoir, key=lambda n: n.id)
        if chunk:
            flush(chunk)
        for fut in pending:
            results.extend(fut.result())
    finally:
        if pool is not None:
            pool.shutdown()
    rep.integrity = checker.finish()
    rep.leaves_total = seen
    rep.leaves_checked = len(results)
    rep.sampled = sample is not None
    results.sort()
    rep.failures = [(nid, step, detail) for nid, ok, step, detail in results if not ok]
    if report_path is not None:
        with open(report_path, "w") as fh:
            for nid, code, msg in rep.integrity.errors:
                fh.write(f"{nid},integrity-fail,{code}\n")
            for nid, ok, step, _ in results:
                fh.write(f"{nid},{'pass' if ok else 'fail'},{step}\n")
    rep.seconds = time.time() - t0
    return rep


def verify_regions(poly, nodes, threads: int = 1, denominator: int = DEFAULT_DENOMINATOR):
    """Exact leaf checks for a flat list of leaves: [(id, ok, step, detail)]."""
    nodes = list(nodes)
    chunks = [nodes[k:k + CHUNK] for k in range(0, len(nodes), CHUNK)]
    if threads > 1:
        with ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(poly, denominator)) as pool:
            parts = list(pool.map(_check_chunk, chunks))
    else:
        _init_worker(poly, denominator)
        parts = [_check_chunk(c) for c in chunks]
    return [r for part in parts for r in part]


def verify_band_cover(grid: BandGrid, regions, assignment, extent=(mpq(2, 15), mpq(1, 2))):
    """Exact check that every grid box B_ij lies in its assigned region.

    Also checks that the grid reaches past ``extent`` (multiples of pi,
    by default 2 pi/15 in theta and pi/2 in phi).  Returns ``(ok, problems)``.
    """
    problems = []
    om = grid.omega
    if not grid.n_theta * om > extent[0] * PI_HI:
        problems.append(f"theta grid does not reach {extent[0]} pi")
    if not grid.n_phi * om > extent[1] * PI_HI:
        problems.append(f"phi grid does not reach {extent[1]} pi")
    if (om * grid.denominator).denominator != 1:
        problems.append("omega is not on the integer grid")
        return False, problems
    a = np.asarray(assignment)
    shape = (grid.n_theta + 1, grid.n_phi + 1)
    if a.shape != shape:
        return False, problems + [f"assignment has shape {a.shape}, expected {shape}"]
    if len(regions) == 0 or a.min() < 0 or a.max() >= len(regions):
        bad = np.argwhere((a < 0) | (a >= max(len(regions), 1)))
        return False, problems + [f"{len(bad)} unmapped grid boxes, first {tuple(bad[0]) if len(bad) else ()}"]
    u = int(om * grid.denominator)
    lo = np.array([r.lo for r in regions], dtype=np.int64)
    hi = np.array([r.hi for r in regions], dtype=np.int64)
    i = np.arange(shape[0], dtype=np.int64)[:, None]
    j = np.arange(shape[1], dtype=np.int64)[None, :]
    L, H = lo[a], hi[a]  # (I+1, J+1, 5); int64 comparisons are exact
    need_lo = [(i - 1) * u, (j - 1) * u, (i - 1) * u, (j - 1) * u, -u]
    need_hi = [(i + 1) * u, (j + 1) * u, (i + 1) * u, (j + 1) * u, u]
    ok = np.ones(shape, dtype=bool)
    for d in range(5):
        ok &= (L[:, :, d] <= need_lo[d]) & (H[:, :, d] >= need_hi[d])
    if not ok.all():
        bad = np.argwhere(~ok)
        problems.append(f"{len(bad)} grid boxes not contained in their region, first {tuple(int(x) for x in bad[0])}")
    return not problems, problems


def _is_node_iterable(src):
    if isinstance(src, (str, bytes)) or hasattr(src, "read") or hasattr(src, "__fspath__"):
        return False
    return True


__all__ = ["verify_leaf", "verify_tree", "verify_regions", "verify_band_cover", "VerificationReport", "DecodeError"]
