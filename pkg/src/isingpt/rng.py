"""Deterministic counter-based random streams (Philox 4x64-10).

Every draw in a simulation is addressed by a triple ``(master seed,
stream id, position)``: stream id 0..R-1 belongs to the replica with that
index, stream ids R, R+1, ... feed swap decisions. Because a draw is a pure
function of its address, results never depend on how work is scheduled
across worker threads, and any stream can be replayed from scratch.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba.types import float64, uint64

MASK64 = 0xFFFFFFFFFFFFFFFF

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_WEYL0 = np.uint64(0x9E3779B97F4A7C15)
_WEYL1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always", cache=True)
def _mulhi64(a, b):
    # high 64 bits of the 128-bit product, via 32-bit limbs
    a_lo = a & _MASK32
    a_hi = a >> _SHIFT32
    b_lo = b & _MASK32
    b_hi = b >> _SHIFT32
    t = a_hi * b_lo
    cross = ((a_lo * b_lo) >> _SHIFT32) + (t & _MASK32) + a_lo * b_hi
    return a_hi * b_hi + (t >> _SHIFT32) + (cross >> _SHIFT32)


@njit(inline="always", cache=True)
def _philox_word0(seed, stream, position):
    # canonical philox4x64-10 block at counter (position, 0, stream, 0),
    # key (seed, stream); first output word
    c0 = position
    c1 = np.uint64(0)
    c2 = stream
    c3 = np.uint64(0)
    k0 = seed
    k1 = stream
    for _ in range(10):
        lo0 = _M0 * c0
        hi0 = _mulhi64(_M0, c0)
        lo1 = _M1 * c2
        hi1 = _mulhi64(_M1, c2)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = k0 + _WEYL0
        k1 = k1 + _WEYL1
    return c0


@njit(float64(uint64, uint64, uint64), cache=True)
def stream_uniform(seed, stream, position):
    """Uniform double in [0, 1) for the draw at (seed, stream, position)."""
    return float((_philox_word0(seed, stream, position) >> _SHIFT11) * _INV53)


class RngStream:
    """One random stream; ``position`` counts draws consumed so far.

    Streams with distinct (master_seed, stream_id) pairs are independent;
    the same pair replays the identical sequence.
    """

    __slots__ = ("master_seed", "stream_id", "position")

    def __init__(self, master_seed: int, stream_id: int, position: int = 0):
        self.master_seed = int(master_seed) & MASK64
        self.stream_id = int(stream_id) & MASK64
        self.position = int(position)

    def uniform(self) -> float:
        """Next uniform double in [0, 1); consumes one draw."""
        u = stream_uniform(self.master_seed, self.stream_id, self.position)
        self.position += 1
        return float(u)

    def choose(self, n: int) -> int:
        """Uniform integer in [0, n); consumes one draw."""
        return int(self.uniform() * n)

    def __repr__(self) -> str:
        return (f"RngStream(master_seed={self.master_seed}, "
                f"stream_id={self.stream_id}, position={self.position})")


class SwapRng:
    """Uniforms for swap decisions, one per (round index, pair index).

    Uses stream ids at and above ``replica_count`` so swap draws never
    collide with the per-replica streams, no matter which worker executes
    the pair or in what order.
    """

    __slots__ = ("master_seed", "replica_count")

    def __init__(self, master_seed: int, replica_count: int):
        self.master_seed = int(master_seed) & MASK64
        self.replica_count = int(replica_count)

    def pair_uniform(self, round_index: int, pair_index: int) -> float:
        return float(stream_uniform(self.master_seed,
                                    self.replica_count + pair_index,
                                    round_index))
