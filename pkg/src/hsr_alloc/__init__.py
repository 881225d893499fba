"""Two-time-scale downlink resource split between a train-mounted mobile relay
and the local users of one cell."""

from .capacity import RateTarget, SnrFactors, c_sum, g1, g2, snr_factors
from .config import ConfigError, RunConfig, parse_config
from .optimizer import Allocation, Infeasible, cpsa, grid_oracle, opsa, opsa_sweep
from .scenario import SystemParams, UserPopulation, default_population, derive_trajectory
from .study import Study

__version__ = "0.1.0"

__all__ = [
    "Allocation", "ConfigError", "Infeasible", "RateTarget", "RunConfig", "SnrFactors",
    "Study", "SystemParams", "UserPopulation", "c_sum", "cpsa", "default_population",
    "derive_trajectory", "g1", "g2", "grid_oracle", "opsa", "opsa_sweep", "parse_config",
    "snr_factors",
]
