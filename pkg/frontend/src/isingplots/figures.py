"""Figure rendering from benchmark CSV outputs.

Five figure kinds, each consuming the documented CSV schemas only (never
engine internals):

- magnetization_curve: observables.csv -> mean |m| per temperature
- convergence_scaling: convergence.csv (L,iterations[,seed]) -> log-log
  scatter with a fitted power law and the exponent annotated
- speedup: timings.csv -> speed-up vs replicas, one line per worker count
- total_time: timings.csv -> mean total seconds vs replicas per workers
- swap_overhead: timings.csv -> mean total seconds per swap interval

Rendering is deterministic for identical inputs (fixed layout, no
timestamps).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

FIGURE_KINDS = ("magnetization_curve", "convergence_scaling", "speedup",
                "total_time", "swap_overhead")

# input file and required columns per kind
_INPUTS = {
    "magnetization_curve": ("observables.csv",
                            ["replica", "temperature", "iteration",
                             "magnetization"]),
    "convergence_scaling": ("convergence.csv", ["L", "iterations"]),
    "speedup": ("timings.csv", ["sweep_point", "workers", "replicas",
                                "total_s", "status"]),
    "total_time": ("timings.csv", ["sweep_point", "workers", "replicas",
                                   "total_s", "status"]),
    "swap_overhead": ("timings.csv", ["sweep_point", "workers",
                                      "swap_interval", "total_s", "status"]),
}

_FIGSIZE = (6.0, 4.0)
_DPI = 120


class PlotError(Exception):
    """Bad inputs: missing file, missing column, or no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_dir: Path
    output: Path
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    burn_in_fraction: float = 0.5  # magnetization_curve only


@dataclass
class RenderResult:
    path: Path
    extras: dict = field(default_factory=dict)


def _load(spec: FigureSpec) -> pd.DataFrame:
    name, required = _INPUTS[spec.kind]
    path = Path(spec.input_dir) / name
    if not path.is_file():
        raise PlotError(f"input file not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise PlotError(f"{name} is missing column(s): {', '.join(missing)}")
    if "status" in frame.columns:
        frame = frame[frame["status"] == "ok"]
    if len(frame) == 0:
        raise PlotError(f"no data rows in {path}")
    return frame


def fit_log_log(sizes, values) -> tuple[float, float]:
    """Least-squares slope and intercept of log(values) against log(sizes)."""
    slope, intercept = np.polyfit(np.log(np.asarray(sizes, float)),
                                  np.log(np.asarray(values, float)), 1)
    return float(slope), float(intercept)


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; returns the output path plus per-kind extras."""
    if spec.kind not in FIGURE_KINDS:
        raise PlotError(f"unknown figure kind: {spec.kind!r}")
    frame = _load(spec)
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    try:
        extras = _RENDERERS[spec.kind](ax, frame, spec)
        ax.set_title(spec.title or spec.kind.replace("_", " "))
        if spec.xlabel is not None:
            ax.set_xlabel(spec.xlabel)
        if spec.ylabel is not None:
            ax.set_ylabel(spec.ylabel)
        fig.tight_layout()
        out = Path(spec.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    return RenderResult(path=Path(spec.output), extras=extras)


def _render_magnetization(ax, frame, spec):
    cut = frame["iteration"].max() * spec.burn_in_fraction
    tail = frame[frame["iteration"] >= cut]
    curve = (tail.assign(abs_m=tail["magnetization"].abs())
             .groupby("temperature")["abs_m"].mean().sort_index())
    ax.plot(curve.index, curve.values, marker="o")
    ax.set_xlabel("temperature")
    ax.set_ylabel("mean |magnetization|")
    ax.set_ylim(0, 1.05)
    ax.grid(alpha=0.3)
    return {"temperatures": list(curve.index),
            "magnetization": list(curve.values)}


def _render_convergence(ax, frame, spec):
    sizes = frame["L"].to_numpy(float)
    iters = frame["iterations"].to_numpy(float)
    if np.any(sizes <= 0) or np.any(iters <= 0):
        raise PlotError("convergence.csv values must be positive")
    exponent, intercept = fit_log_log(sizes, iters)
    ax.scatter(sizes, iters, s=18, alpha=0.8, label="runs")
    grid = np.linspace(sizes.min(), sizes.max(), 64)
    ax.plot(grid, np.exp(intercept) * grid ** exponent, "k--",
            label="power-law fit")
    annotation = f"exponent ≈ {exponent:.2f}"
    ax.annotate(annotation, xy=(0.05, 0.9), xycoords="axes fraction")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("lattice side L")
    ax.set_ylabel("iterations to convergence")
    ax.legend(loc="lower right")
    ax.grid(alpha=0.3, which="both")
    return {"exponent": exponent, "annotation": annotation}


def _grouped_means(frame):
    stats = (frame.groupby(["workers", "replicas"])["total_s"]
             .agg(["mean", "std", "count"]).reset_index())
    stats["std"] = stats["std"].fillna(0.0)
    return stats


def _render_speedup(ax, frame, spec):
    stats = _grouped_means(frame)
    base = stats[stats["workers"] == 1].set_index("replicas")["mean"]
    if len(base) == 0:
        raise PlotError("speedup figure needs workers=1 baseline rows")
    speedups = {}
    for workers, group in stats.groupby("workers"):
        group = group[group["replicas"].isin(base.index)]
        if len(group) == 0:
            continue
        s = base.loc[group["replicas"]].to_numpy() / group["mean"].to_numpy()
        speedups[int(workers)] = dict(zip(group["replicas"].astype(int), s))
        ax.plot(group["replicas"], s, marker="o", label=f"{workers} workers")
    ax.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("replicas")
    ax.set_ylabel("speed-up vs 1 worker")
    ax.legend()
    ax.grid(alpha=0.3)
    return {"speedups": speedups}


def _render_total_time(ax, frame, spec):
    stats = _grouped_means(frame)
    for workers, group in stats.groupby("workers"):
        err = group["std"] if (group["count"] > 1).any() else None
        ax.errorbar(group["replicas"], group["mean"], yerr=err, marker="o",
                    capsize=3, label=f"{workers} workers")
    ax.set_xlabel("replicas")
    ax.set_ylabel("total seconds")
    ax.legend()
    ax.grid(alpha=0.3)
    return {}


def _render_swap_overhead(ax, frame, spec):
    stats = (frame.groupby(["workers", "swap_interval"])["total_s"]
             .agg(["mean", "std", "count"]).reset_index())
    stats["std"] = stats["std"].fillna(0.0)
    intervals = sorted(stats["swap_interval"].unique())
    x = np.arange(len(intervals))
    groups = list(stats.groupby("workers"))
    width = 0.8 / len(groups)
    for k, (workers, group) in enumerate(groups):
        group = group.set_index("swap_interval").reindex(intervals)
        err = group["std"] if (group["count"] > 1).any() else None
        ax.bar(x + k * width, group["mean"], width=width, yerr=err,
               capsize=3, label=f"{workers} workers")
    ax.set_xticks(x + 0.4 - width / 2)
    ax.set_xticklabels([str(i) for i in intervals])
    ax.set_xlabel("swap interval (iterations)")
    ax.set_ylabel("mean total seconds")
    ax.legend()
    ax.grid(alpha=0.3, axis="y")
    return {"intervals": [int(i) for i in intervals]}


_RENDERERS = {
    "magnetization_curve": _render_magnetization,
    "convergence_scaling": _render_convergence,
    "speedup": _render_speedup,
    "total_time": _render_total_time,
    "swap_overhead": _render_swap_overhead,
}
