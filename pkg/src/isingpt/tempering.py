"""Parallel tempering: temperature ladder, pairing schedule, state exchange.

Replica i permanently owns temperature ``1 + 3 i / R``. In a swap round,
adjacent replicas are paired with alternating parity, (0,1)(2,3)... on even
rounds and (1,2)(3,4)... on odd rounds, and each accepted swap exchanges the
two configurations (and their cached energies) while both replicas keep
their temperature slots. Alternation guarantees a configuration can travel
from one end of the ladder to the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mh import Replica
from .rng import SwapRng


def build_ladder(replica_count: int) -> np.ndarray:
    """Temperatures 1 + 3 i / R for i = 0..R-1; strictly increasing in [1, 4)."""
    if replica_count < 1:
        raise ValueError(f"replica_count must be >= 1, got {replica_count}")
    i = np.arange(replica_count, dtype=np.float64)
    return 1.0 + i * 3.0 / replica_count


@dataclass(frozen=True)
class SwapRound:
    """Pairing for one swap round; no replica appears in more than one pair."""

    round_index: int
    parity: str  # "even" or "odd"
    pairs: tuple[tuple[int, int], ...]


def pairing(round_index: int, replica_count: int) -> SwapRound:
    """Adjacent pairs starting at 0 (even rounds) or 1 (odd rounds).

    A trailing unpairable replica sits out that round. Fewer than two
    replicas yields an empty round.
    """
    if round_index < 0:
        raise ValueError("round_index must be >= 0")
    first = round_index % 2
    parity = "odd" if first else "even"
    pairs = tuple((i, i + 1) for i in range(first, replica_count - 1, 2))
    return SwapRound(round_index=round_index, parity=parity, pairs=pairs)


def swap_probability(beta_i: float, beta_j: float,
                     energy_i: float, energy_j: float) -> float:
    """exp(db * dE) / (1 + exp(db * dE)) with both differences taken i minus j.

    Evaluated in the saturating logistic form, so extreme arguments give
    probabilities indistinguishable from 0 or 1 without overflowing, and
    p(i, j) + p(j, i) == 1.
    """
    x = (beta_i - beta_j) * (energy_i - energy_j)
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return ex / (1.0 + ex)


def execute_swap_round(replicas: list[Replica], swap_round: SwapRound,
                       swap_rng: SwapRng) -> int:
    """Decide every pair of the round independently; returns accepted count.

    Pair decisions draw one uniform each from the (round, pair)-keyed swap
    stream, so outcomes do not depend on evaluation order. An accepted swap
    exchanges lattices and cached energies; temperatures and streams stay
    with their slots.
    """
    accepted = 0
    for pair_index, (i, j) in enumerate(swap_round.pairs):
        a, b = replicas[i], replicas[j]
        u = swap_rng.pair_uniform(swap_round.round_index, pair_index)
        p = swap_probability(a.beta, b.beta, a.energy, b.energy)
        if u < p:
            a.lattice, b.lattice = b.lattice, a.lattice
            a.energy, b.energy = b.energy, a.energy
            accepted += 1
    return accepted
