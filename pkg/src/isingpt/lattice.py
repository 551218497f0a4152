"""2D Ising model on a periodic square lattice.

Spins live on an L x L grid of int8 values in {-1, +1} with periodic
boundaries. Energy is ``B * sum_i(s_i) - J * sum_bonds(s_i * s_j)`` where
every nearest-neighbour bond (right and down per site under wrap-around,
2 L^2 bonds in total) is counted exactly once. Note the plus sign on the
field term; with B = 0, the benchmark setting, it is irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .rng import RngStream


@dataclass(frozen=True)
class IsingParams:
    """Coupling strength J and external field B (dimensionless, k_B = 1)."""

    J: float = 1.0
    B: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.J) and np.isfinite(self.B)):
            raise ValueError("J and B must be finite")


@dataclass
class SpinLattice:
    """L x L grid of +/-1 spins, periodic boundaries, L >= 2."""

    spins: np.ndarray

    def __post_init__(self):
        a = self.spins
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"spins must be a square 2D array, got {a.shape}")
        if a.shape[0] < 2:
            raise ValueError("lattice side must be at least 2")
        if a.dtype != np.int8:
            raise ValueError(f"spins must be int8, got {a.dtype}")
        if not np.all(np.abs(a) == 1):
            raise ValueError("every spin must be -1 or +1")

    @property
    def side(self) -> int:
        return self.spins.shape[0]

    @property
    def n_sites(self) -> int:
        return self.spins.size

    def copy(self) -> "SpinLattice":
        return SpinLattice(self.spins.copy())


def total_energy(lattice: SpinLattice, params: IsingParams) -> float:
    """Total energy of the configuration; exact integer-valued for integer J, B."""
    s = lattice.spins.astype(np.int64)
    bond = int(np.sum(s * (np.roll(s, -1, axis=0) + np.roll(s, -1, axis=1))))
    return params.B * int(s.sum()) - params.J * bond


def flip_delta(lattice: SpinLattice, site: tuple[int, int],
               params: IsingParams) -> float:
    """Energy change from flipping the spin at ``site`` (row, col).

    Computed locally from the four periodic neighbours:
    dE = 2 s (J * neighbour_sum - B).
    """
    r, c = site
    L = lattice.side
    if not (0 <= r < L and 0 <= c < L):
        raise IndexError(f"site {site} out of bounds for side {L}")
    a = lattice.spins
    s = int(a[r, c])
    nb = (int(a[(r + 1) % L, c]) + int(a[(r - 1) % L, c])
          + int(a[r, (c + 1) % L]) + int(a[r, (c - 1) % L]))
    return 2.0 * s * (params.J * nb - params.B)


def magnetization_fraction(lattice: SpinLattice) -> float:
    """Mean spin value in [-1, 1]; +/-1 iff all spins are equal."""
    return int(lattice.spins.sum()) / lattice.n_sites


def init_lattice(side: int, up_fraction: float, rng: RngStream) -> SpinLattice:
    """Lattice with exactly round(up_fraction * L^2) up spins, shuffled.

    The count is exact rather than Bernoulli-sampled so every replica starts
    from the identical up/down ratio. Consumes side^2 - 1 draws from ``rng``.
    """
    if side < 2:
        raise ValueError("lattice side must be at least 2")
    if not 0.0 <= up_fraction <= 1.0:
        raise ValueError(f"up_fraction must be in [0, 1], got {up_fraction}")
    spins = np.empty((side, side), dtype=np.int8)
    up_count = round(up_fraction * side * side)
    rng.position = int(kernels.fill_lattice(
        spins, up_count, np.uint64(rng.master_seed),
        np.uint64(rng.stream_id), np.uint64(rng.position)))
    return SpinLattice(spins)
