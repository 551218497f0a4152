"""Post-run statistics: equilibrium magnetization, convergence, scaling fits.

Also provides the small-lattice exact Boltzmann distribution, computed by
full enumeration of all 2^(L^2) configurations. That enumeration is the
independent oracle used to check that the MH sampler actually draws from
the Boltzmann distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .executor import RunRecord
from .lattice import IsingParams


@dataclass(frozen=True)
class ConvergenceCriterion:
    """Stabilization test on the windowed mean of |magnetization|."""

    window: int = 1000
    tolerance: float = 0.02
    statistic: str = "abs_magnetization"

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.statistic != "abs_magnetization":
            raise ValueError(f"unsupported statistic {self.statistic!r}")


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit iterations ~ prefactor * L**exponent."""

    exponent: float
    prefactor: float
    r_squared: float


def equilibrium_magnetization(record: RunRecord,
                              burn_in_fraction: float = 0.5) -> np.ndarray:
    """Mean |m| per temperature slot over the post-burn-in iterations.

    The absolute value keeps the statistic well defined below the critical
    temperature, where the system settles into either sign of magnetization.
    """
    if not 0.0 <= burn_in_fraction < 1.0:
        raise ValueError(
            f"burn_in_fraction must be in [0, 1), got {burn_in_fraction}")
    if record.magnetizations is None:
        raise ValueError("record has no observable series "
                         "(was the run recorded with record_mode='none'?)")
    n = record.magnetizations.shape[1]
    start = int(burn_in_fraction * n)
    if start >= n:
        raise ValueError("post-burn-in window is empty")
    return np.abs(record.magnetizations[:, start:]).mean(axis=1)


def convergence_iteration(series: np.ndarray,
                          criterion: ConvergenceCriterion) -> int | None:
    """First iteration from which the windowed mean of |m| stays stable.

    Returns the smallest t such that the means of |m| over [t, t+w) and
    [t+w, t+2w) differ by less than the tolerance for every later t as
    well, or None if the series never stabilizes.
    """
    m = np.abs(np.asarray(series, dtype=np.float64))
    w = criterion.window
    if m.ndim != 1 or m.size < 2 * w:
        raise ValueError(
            f"series must be 1D with length >= {2 * w}, got shape {m.shape}")
    csum = np.concatenate(([0.0], np.cumsum(m)))
    means = (csum[w:] - csum[:-w]) / w  # means[t] = mean of m[t:t+w]
    diffs = np.abs(means[:-w] - means[w:])
    stable = diffs < criterion.tolerance
    unstable = np.nonzero(~stable)[0]
    if unstable.size == 0:
        return 0
    t = int(unstable[-1]) + 1
    return t if t < stable.size else None


def fit_power_law(points) -> ScalingFit:
    """Least-squares fit of log(iterations) against log(L).

    Needs at least three strictly positive (L, iterations) points.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"points must be (n, 2) shaped, got {pts.shape}")
    if pts.shape[0] < 3:
        raise ValueError(f"need at least 3 points, got {pts.shape[0]}")
    if not np.all(pts > 0):
        raise ValueError("all L and iteration values must be positive")
    x = np.log(pts[:, 0])
    y = np.log(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(residual ** 2)) / ss_tot
    return ScalingFit(exponent=float(slope), prefactor=math.exp(float(intercept)),
                      r_squared=min(max(r2, 0.0), 1.0))


def encode_configurations(states: np.ndarray) -> np.ndarray:
    """Map +/-1 configurations (..., L, L) to integer codes.

    Bit k of the code is 1 iff the spin at row-major site k is up; the codes
    index straight into :func:`exact_boltzmann_distribution`.
    """
    a = np.asarray(states)
    n = a.shape[-1] * a.shape[-2]
    if n > 16:
        raise ValueError(f"lattice too large to encode ({n} sites > 16)")
    bits = (a.reshape(a.shape[:-2] + (n,)) > 0).astype(np.int64)
    return bits @ (1 << np.arange(n, dtype=np.int64))


def exact_boltzmann_distribution(side: int, temperature: float,
                                 params: IsingParams) -> np.ndarray:
    """Boltzmann probability of every configuration, by full enumeration.

    Configuration c has spin +1 at row-major site k iff bit k of c is set.
    Refused for more than 16 sites (the enumeration bound). The returned
    probabilities sum to 1 within 1e-12.
    """
    n = side * side
    if side < 2 or n > 16:
        raise ValueError(f"side must be 2..4 for enumeration, got {side}")
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    codes = np.arange(1 << n, dtype=np.int64)
    spins = 2 * ((codes[:, None] >> np.arange(n, dtype=np.int64)) & 1) - 1
    left = np.empty(n, dtype=np.int64)
    down = np.empty(n, dtype=np.int64)
    for r in range(side):
        for c in range(side):
            k = r * side + c
            left[k] = r * side + (c + 1) % side
            down[k] = ((r + 1) % side) * side + c
    bond = (spins * spins[:, left]).sum(axis=1) + (spins * spins[:, down]).sum(axis=1)
    energy = params.B * spins.sum(axis=1) - params.J * bond
    weights = np.exp(-(energy - energy.min()) / temperature)
    return weights / weights.sum()
