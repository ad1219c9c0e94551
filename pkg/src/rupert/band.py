"""Building the non-local certificate: no solution near the diagonal.

Blocks of grid cells (see ``bandgrid``) are merged into regions C_k
centered on the diagonal, each excluded by the local theorem with P = Q
and sigma_Q = 0.  Blocks that fail are split into quadrants.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .bandgrid import DEFAULT_OMEGA, BandGrid, band_grid
from .builder import BuildConfig, propose_local_witness
from .certtree import LOCAL, CertNode

__all__ = ["DEFAULT_OMEGA", "BandCover", "BandGrid", "band_grid", "build_band_cover", "write_cover"]


@dataclass
class BandCover:
    grid: BandGrid
    blocks: list = field(default_factory=list)     # (i0, i1, j0, j1)
    nodes: list = field(default_factory=list)      # CertNode (LOCAL) per block
    assignment: np.ndarray | None = None           # (I+1, J+1) -> block index
    failed_cells: list = field(default_factory=list)

    def regions(self):
        return [n.region for n in self.nodes]


def build_band_cover(poly, grid: BandGrid, block: int = 32, max_regions: int = 5000,
                     cfg: BuildConfig | None = None, check=None, progress=False) -> BandCover:
    """Cover all cells by diagonal blocks with local witnesses.

    ``check(node)`` may be given to confirm each witness exactly before it
    is accepted (the verifier still re-checks everything).
    """
    cfg = cfg or BuildConfig()
    N = grid.denominator
    cover = BandCover(grid, assignment=np.full((grid.n_theta + 1, grid.n_phi + 1), -1, dtype=np.int64))
    stack = []
    for i0 in range(0, grid.n_theta + 1, block):
        for j0 in range(0, grid.n_phi + 1, block):
            stack.append((i0, min(i0 + block - 1, grid.n_theta), j0, min(j0 + block - 1, grid.n_phi)))
    stack.reverse()
    t0 = last = time.time()
    while stack:
        i0, i1, j0, j1 = stack.pop()
        reg = grid.block_region(i0, i1, j0, j1)
        c = reg.center_float(N)
        eps = float(reg.epsilon(N))
        wit = propose_local_witness(poly, c, eps, cfg, max_symmetries=1)
        node = None
        if wit is not None:
            node = CertNode(len(cover.nodes), LOCAL, reg, p=wit.p, q=wit.q, r=wit.r, sigma_q=wit.sigma_q)
            if check is not None and not check(node):
                node = None
        if node is not None:
            cover.assignment[i0:i1 + 1, j0:j1 + 1] = len(cover.nodes)
            cover.blocks.append((i0, i1, j0, j1))
            cover.nodes.append(node)
        elif i0 == i1 and j0 == j1:
            cover.failed_cells.append((i0, j0))
        else:
            im, jm = (i0 + i1) // 2, (j0 + j1) // 2
            parts = []
            for a, b in ((i0, im), (im + 1, i1)):
                for cc, d in ((j0, jm), (jm + 1, j1)):
                    if a <= b and cc <= d:
                        parts.append((a, b, cc, d))
            stack.extend(reversed(parts))
        if len(cover.nodes) > max_regions:
            break
        if progress and time.time() - last > 5:
            last = time.time()
            print(f"[band] {len(cover.nodes)} regions, {len(stack)} open, {last - t0:.0f}s",
                  file=sys.stderr, flush=True)
    return cover


def write_cover(cover: BandCover, regions_path, assignment_path):
    """Write the regions as LOCAL certificate rows and the cell assignment as CSV."""
    from .certtree import write_csv
    write_csv(cover.nodes, regions_path)
    with open(assignment_path, "w") as fh:
        fh.write("i,j,k\n")
        for i in range(cover.assignment.shape[0]):
            for j, k in enumerate(cover.assignment[i]):
                fh.write(f"{i},{j},{k}\n")
