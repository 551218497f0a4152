"""Metropolis-Hastings kernel: proposal, Boltzmann acceptance, advancement.

A replica is one MH process bound to a fixed temperature. One step draws a
uniformly random site, evaluates the energy change of flipping it, and
accepts with probability min(1, exp(-beta * dE)); the partition function
cancels in the ratio and is never computed. Every step consumes exactly two
draws from the replica's private stream, so stream positions stay
predictable regardless of how many steps ran.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lattice import (IsingParams, SpinLattice, flip_delta, init_lattice,
                      total_energy)
from .rng import RngStream


@dataclass
class Replica:
    """One MCMC process: lattice, temperature slot, cached energy, stream.

    ``energy`` caches total_energy(lattice) and is updated incrementally by
    :func:`mh_step`; ``beta`` is defined as 1/temperature at construction.
    """

    lattice: SpinLattice
    temperature: float
    energy: float
    rng: RngStream
    replica_index: int
    beta: float = field(init=False)

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.replica_index < 0:
            raise ValueError("replica_index must be >= 0")
        self.beta = 1.0 / self.temperature

    def energy_drift(self, params: IsingParams) -> float:
        """Audit: cached energy minus a full recomputation (0 when consistent)."""
        return self.energy - total_energy(self.lattice, params)


def make_replica(side: int, up_fraction: float, temperature: float,
                 master_seed: int, replica_index: int,
                 params: IsingParams) -> Replica:
    """Build a replica whose stream id equals its replica index."""
    rng = RngStream(master_seed, replica_index)
    lat = init_lattice(side, up_fraction, rng)
    return Replica(lattice=lat, temperature=temperature,
                   energy=total_energy(lat, params), rng=rng,
                   replica_index=replica_index)


def propose(replica: Replica) -> tuple[int, int]:
    """Uniformly random trial site (row, col); consumes one draw."""
    L = replica.lattice.side
    site = replica.rng.choose(L * L)
    return site // L, site % L


def acceptance_probability(delta_energy: float, beta: float) -> float:
    """min(1, exp(-beta * dE)); underflow to 0 for very uphill moves is fine."""
    if delta_energy <= 0.0:
        return 1.0
    return math.exp(-beta * delta_energy)


def mh_step(replica: Replica, params: IsingParams) -> bool:
    """One full MH iteration; returns True if the trial flip was accepted.

    Consumes exactly two draws (site, then acceptance uniform). On accept,
    the spin is flipped and the cached energy advanced by dE; on reject the
    state is unchanged.
    """
    site = propose(replica)
    delta = flip_delta(replica.lattice, site, params)
    p = acceptance_probability(delta, replica.beta)
    accepted = replica.rng.uniform() < p
    if accepted:
        r, c = site
        replica.lattice.spins[r, c] = -replica.lattice.spins[r, c]
        replica.energy += delta
    return accepted
