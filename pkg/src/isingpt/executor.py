"""Drives full simulations over a pool of worker threads.

Replicas are partitioned into contiguous blocks, one block per worker, and
advanced in intervals between synchronized swap rounds: every worker stops
at a barrier when its block reaches the swap iteration, the round's pairs
are decided (distributed over the workers), and a second barrier releases
everyone into the next interval. Because every random draw is addressed by
(seed, stream, position) and swap decisions are keyed by (round, pair), the
recorded results are bit-for-bit identical for any worker count.

The hot loops are jitted and release the GIL, so worker threads genuinely
run in parallel. With workers=1 the identical code path runs inline.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lattice import IsingParams
from .rng import MASK64
from .tempering import build_ladder

RECORD_MODES = ("none", "observables", "full_states")


class ConfigurationError(ValueError):
    """Invalid simulation configuration; raised before any work starts."""


@dataclass(frozen=True)
class SimulationConfig:
    """All parameters of a single simulation run."""

    side: int = 32
    replicas: int = 16
    iterations: int = 50_000
    swap_interval: int = 100  # 0 disables swaps
    workers: int = 4
    seed: int = 42
    params: IsingParams = field(default_factory=IsingParams)
    init_up_fraction: float = 0.5
    record_mode: str = "observables"

    def validate(self) -> None:
        if self.side < 2:
            raise ConfigurationError(f"side must be >= 2, got {self.side}")
        if self.replicas < 1:
            raise ConfigurationError(f"replicas must be >= 1, got {self.replicas}")
        if self.iterations < 1:
            raise ConfigurationError(
                f"iterations must be >= 1, got {self.iterations}")
        if self.swap_interval < 0:
            raise ConfigurationError(
                f"swap_interval must be >= 0, got {self.swap_interval}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if not 0.0 <= self.init_up_fraction <= 1.0:
            raise ConfigurationError(
                f"init_up_fraction must be in [0, 1], got {self.init_up_fraction}")
        if self.record_mode not in RECORD_MODES:
            raise ConfigurationError(
                f"record_mode must be one of {RECORD_MODES}, got {self.record_mode!r}")


@dataclass
class RunRecord:
    """Everything one run produced: series, swap statistics, timings."""

    config: SimulationConfig
    temperatures: np.ndarray
    energies: np.ndarray | None  # (R, N) per-iteration totals, by slot
    magnetizations: np.ndarray | None  # (R, N) magnetization fractions
    states: np.ndarray | None  # (R, N, L, L) int8, full_states mode only
    swap_rounds: int
    swaps_attempted: int
    swaps_accepted: int
    rng_positions: np.ndarray  # (R,) final stream positions, == L^2-1 + 2N
    round_entry_iterations: np.ndarray | None  # (rounds, R) barrier audit trail
    init_seconds: float
    exec_seconds: float
    total_seconds: float
    valid: bool = True
    error: str | None = None


def assign_replicas(replica_count: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous index ranges per worker, sizes differing by at most one."""
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    base, extra = divmod(replica_count, workers)
    bounds = []
    lo = 0
    for w in range(workers):
        hi = lo + base + (1 if w < extra else 0)
        bounds.append((lo, hi))
        lo = hi
    return bounds


def _chunk(n: int, parts: int, index: int) -> tuple[int, int]:
    base, extra = divmod(n, parts)
    lo = index * base + min(index, extra)
    return lo, lo + base + (1 if index < extra else 0)


def _interval_plan(iterations: int, interval: int) -> list[tuple[int, int | None]]:
    """(target iteration count, swap round index or None) per interval.

    Iteration 0 runs during initialization, so the plan starts from one
    completed iteration. Round k fires once k*interval iterations are done,
    strictly before the final iteration count is reached.
    """
    plan: list[tuple[int, int | None]] = []
    if interval > 0:
        k = 1
        while k * interval < iterations:
            plan.append((k * interval, k - 1))
            k += 1
    plan.append((iterations, None))
    return plan


class _NoBarrier:
    """Stand-in barrier for the single-worker (sequential) path."""

    def wait(self):
        pass

    def abort(self):
        pass


class _EventBarrier:
    """Reusable sense-reversing barrier built on two events.

    Cheaper per crossing than threading.Barrier (no drain phase), which
    matters because a swap round costs two crossings and short intervals
    mean thousands of rounds.
    """

    def __init__(self, parties: int):
        self._parties = parties
        self._lock = threading.Lock()
        self._count = 0
        self._phase = 0
        self._events = [threading.Event(), threading.Event()]
        self._broken = False

    def wait(self) -> None:
        with self._lock:
            if self._broken:
                raise threading.BrokenBarrierError
            phase = self._phase
            self._count += 1
            if self._count == self._parties:
                self._count = 0
                self._phase ^= 1
                self._events[phase ^ 1].clear()  # re-arm before releasing
                self._events[phase].set()
                return
        self._events[phase].wait()
        if self._broken:
            raise threading.BrokenBarrierError

    def abort(self) -> None:
        with self._lock:
            self._broken = True
            self._events[0].set()
            self._events[1].set()


def run(config: SimulationConfig) -> RunRecord:
    """Execute one simulation: init phase, then synchronized intervals.

    Worker failure aborts the run and returns a record flagged invalid.
    First use pays JIT compilation inside the init phase; call
    :func:`isingpt.kernels.warm_kernels` beforehand when timing matters.
    """
    config.validate()
    t_start = time.perf_counter()
    R, L, N = config.replicas, config.side, config.iterations
    I, W = config.swap_interval, config.workers
    J, B = float(config.params.J), float(config.params.B)
    seed_u = np.uint64(config.seed & MASK64)
    record_flag = RECORD_MODES.index(config.record_mode)

    # --- initialization phase: structures plus iteration 0 of every replica
    t0 = time.perf_counter()
    temps = build_ladder(R)
    betas = 1.0 / temps
    spins = np.empty((R, L, L), dtype=np.int8)
    positions = np.zeros(R, dtype=np.uint64)
    energies = np.zeros(R)
    spin_sums = np.zeros(R, dtype=np.int64)
    slot_to_row = np.arange(R, dtype=np.int64)
    iters_done = np.zeros(R, dtype=np.int64)
    up_count = round(config.init_up_fraction * L * L)
    for r in range(R):
        positions[r] = kernels.fill_lattice(
            spins[r], up_count, seed_u, np.uint64(r), np.uint64(0))
        energies[r] = kernels.lattice_energy(spins[r], J, B)
        spin_sums[r] = int(spins[r].sum(dtype=np.int64))
    if record_flag >= 1:
        obs_e = np.empty((R, N))
        obs_m = np.empty((R, N))
    else:
        obs_e = np.empty((1, 1))
        obs_m = np.empty((1, 1))
    if record_flag == 2:
        states = np.empty((R, N, L, L), dtype=np.int8)
    else:
        states = np.empty((1, 1, 1, 1), dtype=np.int8)
    kernels.advance_block(spins, slot_to_row, 0, R, betas, J, B, energies,
                          spin_sums, positions, iters_done, seed_u, 0, 1,
                          obs_e, obs_m, record_flag, states)
    init_seconds = time.perf_counter() - t0

    # --- execution phase: intervals between swap rounds, two barriers each
    t1 = time.perf_counter()
    plan = _interval_plan(N, I)
    n_rounds = sum(1 for _, ri in plan if ri is not None)
    blocks = assign_replicas(R, W)
    snapshots = (np.zeros((n_rounds, R), dtype=np.int64)
                 if record_flag >= 1 and n_rounds else None)
    accepted = np.zeros(W, dtype=np.int64)
    attempted = np.zeros(W, dtype=np.int64)
    rounds_executed = [0]
    errors: list[BaseException] = []

    def _work(w: int, barrier) -> None:
        lo, hi = blocks[w]
        completed = 1
        try:
            for target, round_index in plan:
                if target > completed and hi > lo:
                    kernels.advance_block(
                        spins, slot_to_row, lo, hi, betas, J, B, energies,
                        spin_sums, positions, iters_done, seed_u,
                        completed, target - completed,
                        obs_e, obs_m, record_flag, states)
                completed = target
                if round_index is None:
                    continue
                barrier.wait()
                first = round_index % 2
                n_pairs = max(0, (R - first) // 2)
                plo, phi = _chunk(n_pairs, W, w)
                if w == 0:
                    if snapshots is not None:
                        snapshots[round_index, :] = iters_done
                    rounds_executed[0] += 1
                if phi > plo:
                    acc = kernels.swap_chunk(
                        slot_to_row, energies, spin_sums, betas, seed_u,
                        R, round_index, first, plo, phi)
                    accepted[w] += int(acc)
                    attempted[w] += phi - plo
                barrier.wait()
        except threading.BrokenBarrierError:
            return
        except BaseException as exc:  # noqa: BLE001 - any failure aborts the run
            errors.append(exc)
            barrier.abort()

    if W == 1:
        _work(0, _NoBarrier())
    else:
        barrier = _EventBarrier(W)
        threads = [threading.Thread(target=_work, args=(w, barrier),
                                    name=f"isingpt-worker-{w}")
                   for w in range(W)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    exec_seconds = time.perf_counter() - t1

    valid = not errors
    return RunRecord(
        config=config,
        temperatures=temps,
        energies=obs_e if record_flag >= 1 else None,
        magnetizations=obs_m if record_flag >= 1 else None,
        states=states if record_flag == 2 else None,
        swap_rounds=rounds_executed[0],
        swaps_attempted=int(attempted.sum()),
        swaps_accepted=int(accepted.sum()),
        rng_positions=positions.astype(np.int64),
        round_entry_iterations=snapshots,
        init_seconds=init_seconds,
        exec_seconds=exec_seconds,
        total_seconds=time.perf_counter() - t_start,
        valid=valid,
        error=None if valid else repr(errors[0]),
    )
