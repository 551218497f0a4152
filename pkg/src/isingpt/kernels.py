"""Jitted hot loops shared by the library API and the threaded executor.

All kernels release the GIL so worker threads can advance disjoint replica
blocks concurrently. Randomness comes exclusively from the counter-based
streams in :mod:`isingpt.rng`, so a kernel's output depends only on its
arguments, never on thread scheduling.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .rng import _philox_word0, _INV53, _SHIFT11

_U1 = np.uint64(1)


@njit(inline="always", cache=True)
def _uniform(seed, stream, position):
    return (_philox_word0(seed, stream, position) >> _SHIFT11) * _INV53


@njit(cache=True, nogil=True)
def fill_lattice(out, up_count, seed, stream, position):
    """Fill a 2D int8 array with +1/-1 spins, exactly ``up_count`` of them up.

    The up spins are placed by a Fisher-Yates shuffle driven by the given
    stream, consuming exactly ``size - 1`` draws. Returns the new position.
    """
    flat = out.ravel()
    n = flat.shape[0]
    for i in range(n):
        flat[i] = 1 if i < up_count else -1
    pos = position
    for i in range(n - 1, 0, -1):
        u = _uniform(seed, stream, pos)
        pos = pos + _U1
        j = int(u * (i + 1))
        tmp = flat[i]
        flat[i] = flat[j]
        flat[j] = tmp
    return pos


@njit(cache=True, nogil=True)
def lattice_energy(spins, J, B):
    """Total energy B*sum(s) - J*sum_bonds(s_i*s_j), each bond counted once."""
    L = spins.shape[0]
    bond = 0
    total = 0
    for r in range(L):
        for c in range(L):
            s = spins[r, c]
            bond += s * (spins[(r + 1) % L, c] + spins[r, (c + 1) % L])
            total += s
    return B * total - J * bond


@njit(cache=True, nogil=True)
def advance_block(spins, slot_to_row, lo, hi, betas, J, B, energies,
                  spin_sums, positions, iters_done, seed, start_iter, nsteps,
                  obs_e, obs_m, record, states):
    """Advance replicas in slots [lo, hi) by ``nsteps`` MH iterations each.

    One iteration = one uniformly chosen site plus one acceptance draw (two
    stream draws). Cached energy and spin sum are updated incrementally; with
    record >= 1 the post-step energy and magnetization fraction land in
    ``obs_e``/``obs_m`` at the iteration index, with record == 2 the full
    configuration is copied into ``states`` as well.
    """
    L = spins.shape[1]
    n_sites = L * L
    for slot in range(lo, hi):
        lat = spins[slot_to_row[slot]]
        beta = betas[slot]
        e = energies[slot]
        ssum = spin_sums[slot]
        pos = positions[slot]
        st = np.uint64(slot)
        for it in range(start_iter, start_iter + nsteps):
            u_site = _uniform(seed, st, pos)
            pos = pos + _U1
            u_acc = _uniform(seed, st, pos)
            pos = pos + _U1
            site = int(u_site * n_sites)
            r = site // L
            c = site - r * L
            s = lat[r, c]
            nb = (lat[(r + 1) % L, c] + lat[(r - 1) % L, c]
                  + lat[r, (c + 1) % L] + lat[r, (c - 1) % L])
            d = 2.0 * s * (J * nb - B)
            if d <= 0.0:
                accept = True
            else:
                accept = u_acc < math.exp(-beta * d)
            if accept:
                lat[r, c] = -s
                e += d
                ssum += -2 * s
            if record >= 1:
                obs_e[slot, it] = e
                obs_m[slot, it] = ssum / n_sites
                if record == 2:
                    for rr in range(L):
                        for cc in range(L):
                            states[slot, it, rr, cc] = lat[rr, cc]
        energies[slot] = e
        spin_sums[slot] = ssum
        positions[slot] = pos
        iters_done[slot] = start_iter + nsteps


@njit(cache=True, nogil=True)
def swap_chunk(slot_to_row, energies, spin_sums, betas, seed, stream_base,
               round_index, first, pair_lo, pair_hi):
    """Decide pairs [pair_lo, pair_hi) of a swap round; returns accepted count.

    Pair p couples slots (first + 2p, first + 2p + 1). Accepting exchanges
    the configurations (row indirection plus cached energy and spin sum)
    while both slots keep their temperatures.
    """
    accepted = 0
    rnd = np.uint64(round_index)
    for p in range(pair_lo, pair_hi):
        i = first + 2 * p
        j = i + 1
        u = _uniform(seed, np.uint64(stream_base + p), rnd)
        x = (betas[i] - betas[j]) * (energies[i] - energies[j])
        if x >= 0.0:
            prob = 1.0 / (1.0 + math.exp(-x))
        else:
            ex = math.exp(x)
            prob = ex / (1.0 + ex)
        if u < prob:
            tr = slot_to_row[i]
            slot_to_row[i] = slot_to_row[j]
            slot_to_row[j] = tr
            te = energies[i]
            energies[i] = energies[j]
            energies[j] = te
            ts = spin_sums[i]
            spin_sums[i] = spin_sums[j]
            spin_sums[j] = ts
            accepted += 1
    return accepted


def warm_kernels() -> None:
    """Force JIT compilation of all kernels so timed runs never pay for it."""
    spins = np.empty((1, 2, 2), dtype=np.int8)
    fill_lattice(spins[0], 2, np.uint64(0), np.uint64(0), np.uint64(0))
    lattice_energy(spins[0], 1.0, 0.0)
    slot_to_row = np.arange(1, dtype=np.int64)
    betas = np.ones(1)
    energies = np.array([float(lattice_energy(spins[0], 1.0, 0.0))])
    spin_sums = np.array([int(spins[0].sum())], dtype=np.int64)
    positions = np.zeros(1, dtype=np.uint64)
    iters = np.zeros(1, dtype=np.int64)
    obs = np.zeros((1, 2))
    states = np.empty((1, 2, 2, 2), dtype=np.int8)
    advance_block(spins, slot_to_row, 0, 1, betas, 1.0, 0.0, energies,
                  spin_sums, positions, iters, np.uint64(0), 0, 2,
                  obs, obs.copy(), 2, states)
    swap_chunk(slot_to_row, energies, spin_sums, betas, np.uint64(0), 1, 0,
               0, 0, 0)
