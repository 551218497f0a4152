"""Benchmark command line: single runs and sweeps with CSV/JSON outputs.

Configuration precedence is CLI flags > config file (JSON via --config) >
preset defaults. Sweep points run sequentially so each one gets the whole
machine, which is what makes speed-up numbers meaningful. Timings land in
``timings.csv``, per-point aggregates (and speed-ups for worker-scaling
sweeps) in ``summary.json``, and recorded observable series in
``observables*.csv``.

Per-repetition seeds are derived by stable hashing, so adding repetitions
never changes earlier rows. Worker-scaling points share one seed per
repetition: the worker count is not part of the workload, and the engine
guarantees identical results for any worker count.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .executor import (ConfigurationError, RunRecord, SimulationConfig,
                       run)
from .kernels import warm_kernels
from .lattice import IsingParams

SWEEP_KINDS = ("single", "worker_scaling", "replica_scaling", "swap_sweep",
               "size_sweep")

RECORD_CHOICES = {"none": "none", "observables": "observables",
                  "full": "full_states"}

PRESETS = {
    # desk: minutes-scale default for laptops and CI
    "desk": dict(size=32, replicas=16, iters=50_000, swap_interval=100,
                 workers=4, seed=42, J=1.0, B=0.0, init_up=0.5),
    # paper-small: scaled-down version of the published benchmark setting
    "paper-small": dict(size=100, replicas=128, iters=100_000,
                        swap_interval=100, workers=4, seed=42, J=1.0, B=0.0,
                        init_up=0.5),
    # paper-full: 300x300 grid, 1500 replicas, 300k iterations; minutes of
    # CPU, and observables recording would need gigabytes (use --record none)
    "paper-full": dict(size=300, replicas=1500, iters=300_000,
                       swap_interval=0, workers=16, seed=42, J=1.0, B=0.0,
                       init_up=0.5),
}

DEFAULT_AXES = {
    "single": (),
    "worker_scaling": (1, 2, 4, 8),
    "replica_scaling": (16, 32, 64, 128),
    "swap_sweep": (0, 100, 1000, 10000),
    "size_sweep": (8, 12, 16, 24, 32),
}

_SETTING_KEYS = ("size", "replicas", "iters", "swap_interval", "workers",
                 "seed", "J", "B", "init_up")
_FILE_KEYS = _SETTING_KEYS + ("preset", "sweep", "axis", "reps", "out",
                              "record")

TIMINGS_COLUMNS = ("sweep_point", "rep", "workers", "replicas", "L", "iters",
                   "swap_interval", "seed", "init_s", "exec_s", "total_s",
                   "swaps_attempted", "swaps_accepted", "status")

OBSERVABLES_COLUMNS = ("replica", "temperature", "iteration", "energy",
                       "magnetization")


class UsageError(Exception):
    """Bad flags or config file; maps to exit code 1."""


@dataclass(frozen=True)
class SweepSpec:
    """A fully resolved request: what to run, how often, where to write."""

    kind: str
    base: SimulationConfig
    axis: tuple[int, ...]
    reps: int
    out_dir: Path
    record_mode: str  # as in SimulationConfig.record_mode


@dataclass
class TimingRow:
    """One line of timings.csv."""

    sweep_point: str
    rep: int
    workers: int
    replicas: int
    L: int
    iters: int
    swap_interval: int
    seed: int
    init_s: float
    exec_s: float
    total_s: float
    swaps_attempted: int
    swaps_accepted: int
    status: str

    def to_csv(self) -> str:
        return ",".join(str(getattr(self, c)) for c in TIMINGS_COLUMNS)

    @classmethod
    def from_csv(cls, line: str) -> "TimingRow":
        parts = line.rstrip("\n").split(",")
        if len(parts) != len(TIMINGS_COLUMNS):
            raise ValueError(f"expected {len(TIMINGS_COLUMNS)} columns, "
                             f"got {len(parts)}")
        types = (str, int, int, int, int, int, int, int, float, float, float,
                 int, int, str)
        return cls(*(t(v) for t, v in zip(types, parts)))


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="isingpt", description=__doc__.splitlines()[0],
                add_help=True)
    p.add_argument("--size", type=int, help="lattice side length L")
    p.add_argument("--replicas", type=int, help="number of replicas")
    p.add_argument("--iters", type=int, help="MH iterations per replica")
    p.add_argument("--swap-interval", type=int, dest="swap_interval",
                   help="iterations between swap rounds (0 disables swaps)")
    p.add_argument("--workers", type=int, help="worker threads")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--J", type=float, help="coupling strength")
    p.add_argument("--B", type=float, help="external field")
    p.add_argument("--init-up", type=float, dest="init_up",
                   help="initial fraction of up spins")
    p.add_argument("--preset", choices=sorted(PRESETS),
                   help="named parameter set (default: desk)")
    p.add_argument("--sweep", choices=SWEEP_KINDS,
                   help="benchmark sweep kind (default: single)")
    p.add_argument("--axis", help="comma-separated sweep axis values")
    p.add_argument("--reps", type=int, help="repetitions per sweep point")
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--record", choices=sorted(RECORD_CHOICES),
                   help="what to record per iteration "
                        "(default: observables for single, none for sweeps)")
    p.add_argument("--config", help="JSON config file (flags take precedence)")
    return p


def derive_seed(master_seed: int, point_id: str, rep: int) -> int:
    """Stable per-run seed; independent of Python's salted hash."""
    digest = hashlib.sha256(
        f"{master_seed}|{point_id}|{rep}".encode()).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFFFFFFFFFFFFFF


def parse_config(argv: list[str] | None = None) -> SweepSpec:
    """Resolve flags, optional config file and preset into a SweepSpec."""
    ns = _build_parser().parse_args(argv)

    file_cfg: dict = {}
    if ns.config is not None:
        path = Path(ns.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            file_cfg = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        unknown = sorted(set(file_cfg) - set(_FILE_KEYS))
        if unknown:
            raise UsageError(f"unknown config file key(s): {', '.join(unknown)}")

    preset = ns.preset or file_cfg.get("preset") or "desk"
    if preset not in PRESETS:
        raise UsageError(f"unknown preset: {preset}")
    merged = dict(PRESETS[preset])
    for key in _SETTING_KEYS:
        if key in file_cfg:
            merged[key] = file_cfg[key]
        value = getattr(ns, key, None)
        if value is not None:
            merged[key] = value

    kind = ns.sweep or file_cfg.get("sweep") or "single"
    if kind not in SWEEP_KINDS:
        raise UsageError(f"sweep must be one of {SWEEP_KINDS}, got {kind!r}")

    if ns.axis is not None:
        try:
            axis = tuple(int(v) for v in ns.axis.split(",") if v.strip() != "")
        except ValueError as exc:
            raise UsageError(f"axis values must be integers: {ns.axis!r}") from exc
    elif "axis" in file_cfg:
        axis = tuple(int(v) for v in file_cfg["axis"])
    else:
        axis = DEFAULT_AXES[kind]
    if kind != "single" and not axis:
        raise UsageError(f"axis must be non-empty for sweep kind {kind}")

    reps = ns.reps if ns.reps is not None else file_cfg.get("reps", 1)
    if reps < 1:
        raise UsageError(f"reps must be >= 1, got {reps}")

    out_dir = Path(ns.out or file_cfg.get("out") or "results")

    record = ns.record or file_cfg.get("record")
    if record is None:
        record = "observables" if kind == "single" else "none"
    if record not in RECORD_CHOICES:
        raise UsageError(f"record must be one of {sorted(RECORD_CHOICES)}, "
                         f"got {record!r}")
    record_mode = RECORD_CHOICES[record]

    try:
        base = SimulationConfig(
            side=int(merged["size"]),
            replicas=int(merged["replicas"]),
            iterations=int(merged["iters"]),
            swap_interval=int(merged["swap_interval"]),
            workers=int(merged["workers"]),
            seed=int(merged["seed"]),
            params=IsingParams(J=float(merged["J"]), B=float(merged["B"])),
            init_up_fraction=float(merged["init_up"]),
            record_mode=record_mode,
        )
        base.validate()
    except (ConfigurationError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    _validate_axis(kind, axis)
    return SweepSpec(kind=kind, base=base, axis=axis, reps=reps,
                     out_dir=out_dir, record_mode=record_mode)


def _validate_axis(kind: str, axis: tuple[int, ...]) -> None:
    checks = {
        "worker_scaling": (lambda v: v >= 1, "workers must be >= 1"),
        "replica_scaling": (lambda v: v >= 1, "replicas must be >= 1"),
        "swap_sweep": (lambda v: v >= 0, "swap_interval must be >= 0"),
        "size_sweep": (lambda v: v >= 2, "size must be >= 2"),
    }
    if kind in checks:
        ok, msg = checks[kind]
        for v in axis:
            if not ok(v):
                raise UsageError(f"axis: {msg}, got {v}")


def _points(spec: SweepSpec) -> list[tuple[str, SimulationConfig]]:
    base = spec.base
    if spec.kind == "single":
        return [("single", base)]
    if spec.kind == "worker_scaling":
        return [(f"W={v}", replace(base, workers=v)) for v in spec.axis]
    if spec.kind == "replica_scaling":
        return [(f"R={v}", replace(base, replicas=v)) for v in spec.axis]
    if spec.kind == "swap_sweep":
        return [(f"I={v}", replace(base, swap_interval=v)) for v in spec.axis]
    return [(f"L={v}", replace(base, side=v)) for v in spec.axis]


def _seed_point_key(kind: str, point_id: str) -> str:
    # worker count is not part of the workload: all worker-scaling points
    # share seeds, so every W runs the identical simulation
    return "" if kind == "worker_scaling" else point_id


def _write_observables(path: Path, record: RunRecord) -> None:
    temps = record.temperatures
    energies = record.energies
    mags = record.magnetizations
    lines = [",".join(OBSERVABLES_COLUMNS)]
    for r in range(energies.shape[0]):
        t = repr(float(temps[r]))
        e_row = energies[r].tolist()
        m_row = mags[r].tolist()
        lines.extend(f"{r},{t},{i},{e!r},{m!r}"
                     for i, (e, m) in enumerate(zip(e_row, m_row)))
    path.write_text("\n".join(lines) + "\n")


def emit_speedup_table(rows: list[TimingRow],
                       baseline: str) -> list[tuple[str, float, float]]:
    """(point, mean speed-up vs baseline, stddev) for every sweep point.

    Speed-up is baseline mean total over point mean total; the stddev is
    taken over the point's per-repetition speed-ups. Only rows with status
    "ok" participate.
    """
    ok = [r for r in rows if r.status == "ok"]
    base_totals = [r.total_s for r in ok if r.sweep_point == baseline]
    if not base_totals:
        raise ValueError(f"baseline point {baseline!r} has no successful rows")
    base_mean = float(np.mean(base_totals))
    table = []
    for point in dict.fromkeys(r.sweep_point for r in rows):
        totals = [r.total_s for r in ok if r.sweep_point == point]
        if not totals:
            continue
        per_rep = [base_mean / t for t in totals]
        table.append((point, base_mean / float(np.mean(totals)),
                      float(np.std(per_rep))))
    return table


def run_sweep(spec: SweepSpec) -> int:
    """Execute every (point x repetition); returns the process exit code.

    Failures are recorded per row and the sweep continues; any failed row
    makes the exit code 2.
    """
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    warm_kernels()  # keep JIT compilation out of the timed runs
    points = _points(spec)
    single_file = spec.kind == "single" and spec.reps == 1
    rows: list[TimingRow] = []
    for point_id, cfg in points:
        for rep in range(spec.reps):
            seed = derive_seed(spec.base.seed,
                               _seed_point_key(spec.kind, point_id), rep)
            run_cfg = replace(cfg, seed=seed, record_mode=spec.record_mode)
            record: RunRecord | None = None
            try:
                record = run(run_cfg)
                status = "ok" if record.valid else f"error: {record.error}"
            except Exception as exc:  # noqa: BLE001 - keep sweeping
                status = f"error: {exc}"
            # keep the single-line comma-separated schema parseable
            status = status.replace(",", ";").replace("\n", " ")
            rows.append(TimingRow(
                sweep_point=point_id, rep=rep, workers=run_cfg.workers,
                replicas=run_cfg.replicas, L=run_cfg.side,
                iters=run_cfg.iterations,
                swap_interval=run_cfg.swap_interval, seed=seed,
                init_s=record.init_seconds if record else 0.0,
                exec_s=record.exec_seconds if record else 0.0,
                total_s=record.total_seconds if record else 0.0,
                swaps_attempted=record.swaps_attempted if record else 0,
                swaps_accepted=record.swaps_accepted if record else 0,
                status=status))
            print(f"[isingpt] {point_id} rep {rep}: {status}"
                  + (f" total {record.total_seconds:.3f}s" if record else ""),
                  file=sys.stderr)
            if record is not None and record.valid and \
                    spec.record_mode != "none":
                name = ("observables.csv" if single_file
                        else f"observables-{point_id}-rep{rep}.csv")
                _write_observables(spec.out_dir / name, record)
                if record.states is not None:
                    states_name = ("states.npz" if single_file
                                   else f"states-{point_id}-rep{rep}.npz")
                    np.savez_compressed(
                        spec.out_dir / states_name, states=record.states,
                        temperatures=record.temperatures)

    (spec.out_dir / "timings.csv").write_text(
        ",".join(TIMINGS_COLUMNS) + "\n"
        + "".join(r.to_csv() + "\n" for r in rows))
    _write_summary(spec, rows)
    return 0 if all(r.status == "ok" for r in rows) else 2


def _write_summary(spec: SweepSpec, rows: list[TimingRow]) -> None:
    baseline = "W=1" if spec.kind == "worker_scaling" else None
    speedups: dict[str, float] = {}
    if baseline is not None:
        try:
            speedups = {p: s for p, s, _ in emit_speedup_table(rows, baseline)}
        except ValueError:
            baseline = None
    points = []
    for point in dict.fromkeys(r.sweep_point for r in rows):
        ok = [r for r in rows if r.sweep_point == point and r.status == "ok"]
        totals = [r.total_s for r in ok]
        att = sum(r.swaps_attempted for r in ok)
        acc = sum(r.swaps_accepted for r in ok)
        points.append({
            "point": point,
            "mean_total_s": float(np.mean(totals)) if totals else None,
            "std_total_s": float(np.std(totals)) if totals else None,
            "swap_accept_rate": (acc / att) if att else 0.0,
            "speedup": speedups.get(point),
        })
    summary = {"sweep": spec.kind, "baseline": baseline, "points": points}
    (spec.out_dir / "summary.json").write_text(json.dumps(summary, indent=2)
                                               + "\n")


def main(argv: list[str] | None = None) -> int:
    try:
        spec = parse_config(argv)
    except UsageError as exc:
        print(f"isingpt: error: {exc}", file=sys.stderr)
        return 1
    t0 = time.perf_counter()
    code = run_sweep(spec)
    print(f"[isingpt] sweep finished in {time.perf_counter() - t0:.1f}s, "
          f"outputs in {spec.out_dir}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
