"""The grid of near-diagonal boxes B_ij used by the non-local certificate.

    B_ij = [A_i +- w, A_j +- w, A_i +- w, A_j +- w, 0 +- w],  A_k = k w,

for 0 <= i <= I and 0 <= j <= J, where I w > 2 pi/15 and J w > pi/2.  A
block of consecutive (i, j) cells corresponds to one region centered on
the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .certtree import DEFAULT_DENOMINATOR, Region5
from .pi import PI_HI, PI_LO

DEFAULT_OMEGA = mpq(6, 10000)


@dataclass(frozen=True)
class BandGrid:
    omega: mpq
    denominator: int
    n_theta: int   # I: largest i index
    n_phi: int     # J: largest j index

    @property
    def unit(self) -> int:
        return int(self.omega * self.denominator)

    def cell_count(self):
        return (self.n_theta + 1) * (self.n_phi + 1)

    def block_region(self, i0, i1, j0, j1) -> Region5:
        u = self.unit
        return Region5((u * (i0 - 1), u * (j0 - 1), u * (i0 - 1), u * (j0 - 1), -u),
                       (u * (i1 + 1), u * (j1 + 1), u * (i1 + 1), u * (j1 + 1), u))


def _first_exceeding(omega, pi_coef):
    """Smallest k with k * omega > pi_coef * pi, decided with PI_HI."""
    k = int(pi_coef * PI_LO / omega)
    while not k * omega > pi_coef * PI_HI:
        k += 1
    if (k - 1) * omega > pi_coef * PI_LO:
        raise ArithmeticError("pi enclosure cannot decide the grid extent")
    return k


def band_grid(omega=DEFAULT_OMEGA, denominator: int = DEFAULT_DENOMINATOR,
              theta_max=mpq(2, 15), phi_max=mpq(1, 2)) -> BandGrid:
    """Grid covering theta in [0, theta_max pi] and phi in [0, phi_max pi]."""
    omega = mpq(omega)
    if omega <= 0 or (omega * denominator).denominator != 1:
        raise ValueError("omega * denominator must be a positive integer")
    return BandGrid(omega, denominator, _first_exceeding(omega, theta_max), _first_exceeding(omega, phi_max))
