"""Metropolis-Hastings with parallel tempering for the 2D Ising model."""

from .analysis import (ConvergenceCriterion, ScalingFit, convergence_iteration,
                       encode_configurations, equilibrium_magnetization,
                       exact_boltzmann_distribution, fit_power_law)
from .executor import (ConfigurationError, RunRecord, SimulationConfig,
                       assign_replicas, run)
from .lattice import (IsingParams, SpinLattice, flip_delta, init_lattice,
                      magnetization_fraction, total_energy)
from .mh import Replica, acceptance_probability, make_replica, mh_step, propose
from .rng import RngStream, SwapRng
from .tempering import (SwapRound, build_ladder, execute_swap_round, pairing,
                        swap_probability)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ConvergenceCriterion",
    "IsingParams",
    "Replica",
    "RngStream",
    "RunRecord",
    "ScalingFit",
    "SimulationConfig",
    "SpinLattice",
    "SwapRng",
    "SwapRound",
    "acceptance_probability",
    "assign_replicas",
    "build_ladder",
    "convergence_iteration",
    "encode_configurations",
    "equilibrium_magnetization",
    "exact_boltzmann_distribution",
    "execute_swap_round",
    "fit_power_law",
    "flip_delta",
    "init_lattice",
    "magnetization_fraction",
    "make_replica",
    "mh_step",
    "pairing",
    "propose",
    "run",
    "swap_probability",
    "total_energy",
]
