"""Certificate trees: regions, nodes, the CSV codec and integrity checks.

A certificate tree is a table with one row per node.  Every node carries a
closed five-dimensional box ``[T1, V1, T2, V2, A]`` (theta_1, phi_1,
theta_2, phi_2, alpha) stored as integer numerators over a common
denominator ``N``.  Interior nodes (type 3) point at a consecutive block of
children; leaves are excluded by the global (type 1) or local (type 2)
theorem, with the witness stored in the row.  All fields are integers.
"""

from __future__ import annotations

import csv
import gzip
import heapq
import io
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np
from gmpy2 import mpq

DEFAULT_DENOMINATOR = 15_360_000
DIMS = ("T1", "V1", "T2", "V2", "A")

COLUMNS = (
    "ID", "nodeType", "nrChildren", "IDfirstChild", "split",
    "T1_min", "T1_max", "V1_min", "V1_max", "T2_min", "T2_max",
    "V2_min", "V2_max", "A_min", "A_max",
    "S_index", "wx_nominator", "wy_nominator", "w_denominator",
    "P1_index", "P2_index", "P3_index", "Q1_index", "Q2_index", "Q3_index",
    "r", "sigma_Q",
)
_ALIASES = {"wx_numerator": "wx_nominator", "wy_numerator": "wy_nominator"}

GLOBAL, LOCAL, INTERIOR = 1, 2, 3
SPLIT_ALL = 6


class DecodeError(ValueError):
    """Malformed certificate input (distinct from a mathematical failure)."""


@dataclass(frozen=True)
class Region5:
    """Closed box with integer bounds ``lo[d] <= hi[d]`` over a denominator."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != 5 or len(self.hi) != 5:
            raise ValueError("Region5 needs five lower and five upper bounds")
        object.__setattr__(self, "lo", tuple(int(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(int(x) for x in self.hi))
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty interval in region {self.lo} {self.hi}")

    @classmethod
    def from_flat(cls, values):
        v = [int(x) for x in values]
        return cls(tuple(v[0::2]), tuple(v[1::2]))

    def flat(self):
        out = []
        for a, b in zip(self.lo, self.hi):
            out += [a, b]
        return tuple(out)

    def widths(self):
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def center(self, denominator=DEFAULT_DENOMINATOR):
        return tuple(mpq(a + b, 2 * denominator) for a, b in zip(self.lo, self.hi))

    def center_float(self, denominator=DEFAULT_DENOMINATOR):
        return np.array([(a + b) / (2 * denominator) for a, b in zip(self.lo, self.hi)])

    def epsilon(self, denominator=DEFAULT_DENOMINATOR) -> mpq:
        return mpq(max(self.widths()), 2 * denominator)

    def contains(self, other: "Region5") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))

    def contains_point(self, point, denominator=DEFAULT_DENOMINATOR) -> bool:
        return all(a <= mpq(x) * denominator <= b for a, b, x in zip(self.lo, self.hi, point))


@dataclass(frozen=True)
class CertNode:
    id: int
    node_type: int
    region: Region5
    n_children: int | None = None
    first_child: int | None = None
    split: int | None = None
    s_index: int | None = None
    wx: int | None = None
    wy: int | None = None
    wd: int | None = None
    p: tuple | None = None
    q: tuple | None = None
    r: int | None = None
    sigma_q: int | None = None

    @property
    def is_leaf(self):
        return self.node_type in (GLOBAL, LOCAL)

    def children_ids(self):
        if self.node_type != INTERIOR:
            return range(0)
        return range(self.first_child, self.first_child + self.n_children)

    def row(self):
        """The CSV row as a list of strings (empty fields for unused columns)."""
        def s(x):
            return "" if x is None else str(int(x))

        p = self.p or (None,) * 3
        q = self.q or (None,) * 3
        return [
            s(self.id), s(self.node_type), s(self.n_children), s(self.first_child), s(self.split),
            *[str(x) for x in self.region.flat()],
            s(self.s_index), s(self.wx), s(self.wy), s(self.wd),
            *[s(x) for x in p], *[s(x) for x in q],
            s(self.r), s(self.sigma_q),
        ]


@dataclass
class CertTree:
    nodes: list = field(default_factory=list)

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    @property
    def root(self) -> CertNode:
        return self.nodes[0]

    def leaves(self):
        return (n for n in self.nodes if n.is_leaf)


# -- CSV codec ---------------------------------------------------------------

def _open_text(source):
    """Return a text stream for a path, bytes, or binary/text file object."""
    if isinstance(source, (bytes, bytearray)):
        raw = io.BytesIO(source)
    elif isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        raw = open(source, "rb")
    else:
        raw = source
    if isinstance(raw, io.TextIOBase):
        return raw
    head = raw.peek(2)[:2] if hasattr(raw, "peek") else None
    if head is None:
        data = raw.read()
        raw = io.BytesIO(data)
        head = data[:2]
    if head == b"\x1f\x8b":
        raw = gzip.GzipFile(fileobj=raw)
    return io.TextIOWrapper(raw, encoding="utf-8", newline="")


def _int_field(row, name, lineno, required):
    v = row.get(name, "")
    v = "" if v is None else v.strip()
    if v == "":
        if required:
            raise DecodeError(f"line {lineno}: missing field {name}")
        return None
    try:
        return int(v)
    except ValueError:
        raise DecodeError(f"line {lineno}: non-integer value {v!r} in {name}") from None


def node_from_row(row: dict, lineno: int = 0) -> CertNode:
    g = lambda name, req=False: _int_field(row, name, lineno, req)  # noqa: E731
    nid = g("ID", True)
    t = g("nodeType", True)
    if t not in (GLOBAL, LOCAL, INTERIOR):
        raise DecodeError(f"line {lineno}: unknown nodeType {t}")
    try:
        region = Region5.from_flat([g(c + suffix, True) for c in DIMS for suffix in ("_min", "_max")])
    except ValueError as exc:
        raise DecodeError(f"line {lineno}: {exc}") from None
    if t == INTERIOR:
        n, first, split = g("nrChildren", True), g("IDfirstChild", True), g("split", True)
        if n < 1:
            raise DecodeError(f"line {lineno}: nrChildren must be positive")
        if split not in range(1, 7):
            raise DecodeError(f"line {lineno}: split code {split} not in 1..6")
        if split == SPLIT_ALL and n != 32:
            raise DecodeError(f"line {lineno}: split=6 requires nrChildren=32, got {n}")
        return CertNode(nid, t, region, n_children=n, first_child=first, split=split)
    if t == GLOBAL:
        return CertNode(nid, t, region, s_index=g("S_index", True), wx=g("wx_nominator", True),
                        wy=g("wy_nominator", True), wd=g("w_denominator", True))
    p = tuple(g(f"P{i}_index", True) for i in (1, 2, 3))
    q = tuple(g(f"Q{i}_index", True) for i in (1, 2, 3))
    return CertNode(nid, t, region, p=p, q=q, r=g("r", True), sigma_q=g("sigma_Q", True))


def iter_nodes(source) -> Iterator[CertNode]:
    """Stream nodes from a CSV (optionally gzip-compressed) source."""
    stream = _open_text(source)
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise DecodeError("empty certificate file") from None
    header = [_ALIASES.get(h.strip(), h.strip()) for h in header]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise DecodeError(f"header lacks columns {missing}")
    extra = [h for h in header if h not in COLUMNS]
    if extra:
        warnings.warn(f"ignoring unknown columns {extra}")
    for lineno, values in enumerate(reader, start=2):
        if not values:
            continue
        if len(values) != len(header):
            raise DecodeError(f"line {lineno}: expected {len(header)} fields, got {len(values)}")
        yield node_from_row(dict(zip(header, values)), lineno)


def decode_csv(source) -> CertTree:
    return CertTree(list(iter_nodes(source)))


def write_csv(nodes: Iterable[CertNode], out, compress: bool | None = None):
    """Write nodes to a path or text stream.  Paths ending in .gz are gzipped."""
    if isinstance(out, (str,)) or hasattr(out, "__fspath__"):
        path = str(out)
        if compress is None:
            compress = path.endswith(".gz")
        opener = gzip.open if compress else open
        with opener(path, "wt", encoding="utf-8", newline="") as fh:
            _write_rows(nodes, fh)
    else:
        _write_rows(nodes, out)


def _write_rows(nodes, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for n in nodes:
        w.writerow(n.row())


def encode_csv(tree) -> bytes:
    buf = io.StringIO()
    _write_rows(tree, buf)
    return buf.getvalue().encode("utf-8")


def validate_node(node: CertNode, n_vertices: int | None = None) -> list:
    """Field-level problems that make a leaf witness unusable."""
    problems = []
    if node.node_type == LOCAL:
        if node.r is None or node.r <= 0:
            problems.append(f"r must be positive, got {node.r}")
        if node.sigma_q not in (0, 1):
            problems.append(f"sigma_Q must be 0 or 1, got {node.sigma_q}")
        idx = (node.p or ()) + (node.q or ())
    elif node.node_type == GLOBAL:
        if not node.wd:
            problems.append("w_denominator must be nonzero")
        idx = (node.s_index,)
    else:
        idx = ()
    if n_vertices is not None:
        bad = [i for i in idx if i is None or not 0 <= i < n_vertices]
        if bad:
            problems.append(f"vertex index out of range: {bad}")
    return problems


# -- integrity ---------------------------------------------------------------

COVERAGE, NODE_TYPE, ROOT, CHILD_ORDER, STRUCTURE = "coverage", "node-type", "root", "child-order", "structure"


def children_cover(parent: Region5, children) -> bool:
    """Exact test that the union of closed child boxes contains ``parent``."""
    cuts = []
    for d in range(5):
        lo, hi = parent.lo[d], parent.hi[d]
        pts = {lo, hi}
        for c in children:
            for x in (c.lo[d], c.hi[d]):
                if lo < x < hi:
                    pts.add(x)
        cuts.append(sorted(pts))
    shape = tuple(max(len(p) - 1, 1) for p in cuts)
    if int(np.prod(shape)) > 4_000_000:
        return False
    covered = np.zeros(shape, dtype=bool)
    for c in children:
        sl = []
        for d in range(5):
            p = cuts[d]
            if len(p) == 1:  # degenerate parent interval
                if c.lo[d] <= p[0] <= c.hi[d]:
                    sl.append(slice(0, 1))
                    continue
                break
            # cells [p[k], p[k+1]] inside [c.lo, c.hi]
            a = np.searchsorted(p, c.lo[d], side="left")
            b = np.searchsorted(p, c.hi[d], side="right") - 1
            if b <= a:
                break
            sl.append(slice(a, b))
        else:
            covered[tuple(sl)] = True
    return bool(covered.all())


@dataclass
class IntegrityReport:
    n_nodes: int = 0
    n_interior: int = 0
    n_global: int = 0
    n_local: int = 0
    errors: list = field(default_factory=list)  # (node id, code, message)

    @property
    def ok(self):
        return not self.errors and self.n_nodes > 0


class IntegrityChecker:
    """Streaming structural check of a certificate tree.

    Feed nodes in file order.  Memory is bounded by the number of interior
    nodes whose child blocks have not been reached yet, plus one block.
    """

    def __init__(self, target: Region5 | None, max_errors: int = 1000):
        self.target = target
        self.report = IntegrityReport()
        self.max_errors = max_errors
        self._expect = 0
        self._pending = []  # heap of (first_child, parent id, n, region)
        self._block = None  # [parent id, region, remaining, children]

    def _err(self, nid, code, msg):
        if len(self.report.errors) < self.max_errors:
            self.report.errors.append((nid, code, msg))

    def feed(self, node: CertNode):
        rep = self.report
        rep.n_nodes += 1
        nid = node.id
        if nid != self._expect:
            self._err(nid, STRUCTURE, f"expected ID {self._expect}, found {nid}")
            self._expect = nid
        self._expect += 1

        if node.node_type == INTERIOR:
            rep.n_interior += 1
        elif node.node_type == GLOBAL:
            rep.n_global += 1
        elif node.node_type == LOCAL:
            rep.n_local += 1
        else:
            self._err(nid, NODE_TYPE, f"nodeType {node.node_type}")

        if nid == 0:
            if self.target is not None and not node.region.contains(self.target):
                self._err(0, ROOT, "root region does not contain the target region")
        self._attach(node)

        if node.node_type == INTERIOR:
            if not node.n_children or node.n_children < 1:
                self._err(nid, NODE_TYPE, "interior node without children")
            elif node.first_child is None or node.first_child <= nid:
                self._err(nid, CHILD_ORDER, f"first child {node.first_child} not after parent {nid}")
            else:
                heapq.heappush(self._pending, (node.first_child, nid, node.n_children, node.region))

    def _attach(self, node):
        nid = node.id
        starts_here = []
        while self._pending and self._pending[0][0] <= nid:
            starts_here.append(heapq.heappop(self._pending))
        stale = [e for e in starts_here if e[0] < nid]
        for e in stale:
            self._err(e[1], STRUCTURE, f"child block starting at {e[0]} overlaps another block or is missing")
        fresh = [e for e in starts_here if e[0] == nid]
        if self._block is not None:
            for e in fresh:
                self._err(e[1], STRUCTURE, f"child block starting at {nid} overlaps the block of node {self._block[0]}")
            self._block[3].append(node.region)
            self._block[2] -= 1
            if self._block[2] == 0:
                self._close_block()
            return
        if not fresh:
            if nid != 0:
                self._err(nid, STRUCTURE, "node is not referenced by any parent")
            return
        for e in fresh[1:]:
            self._err(e[1], STRUCTURE, f"node {nid} referenced by more than one parent")
        first, pid, n, region = fresh[0]
        self._block = [pid, region, n - 1, [node.region]]
        if n == 1:
            self._close_block()

    def _close_block(self):
        pid, region, _, kids = self._block
        self._block = None
        if not children_cover(region, kids):
            self._err(pid, COVERAGE, "children do not cover the parent region")

    def finish(self) -> IntegrityReport:
        if self._block is not None:
            self._err(self._block[0], STRUCTURE, f"{self._block[2]} children missing at end of file")
            self._block = None
        for first, pid, n, _ in self._pending:
            self._err(pid, STRUCTURE, f"children {first}..{first + n - 1} missing")
        self._pending = []
        if self.report.n_nodes == 0:
            self._err(-1, STRUCTURE, "empty tree")
        return self.report


def integrity_check(tree, root_target: Region5 | None) -> IntegrityReport:
    chk = IntegrityChecker(root_target)
    for node in tree:
        chk.feed(node)
    return chk.finish()


def subtree_stats(tree) -> dict:
    counts = {"interior": 0, "leaves": 0, "global": 0, "local": 0}
    for n in tree:
        if n.node_type == INTERIOR:
            counts["interior"] += 1
        else:
            counts["leaves"] += 1
            counts["global" if n.node_type == GLOBAL else "local"] += 1
    return counts
