"""Outage simulation and diversity-multiplexing analysis for a K-relay
switching amplify-and-forward scheme on Rayleigh block fading."""

__version__ = "0.1.0"

from .config import ConfigError, SchemeConfig
from .dmt import dmt_theorem1, dmt_theorem2_lower, dmt_upper_bound, lp_oracle_ni
from .outage import fit_diversity_slope, monte_carlo_outage
from .topology import (
    REGIME_INTERFERENCE,
    REGIME_NO_INTERFERENCE,
    InterferenceGraph,
    hamiltonian_relay_order,
)

__all__ = [
    "ConfigError",
    "SchemeConfig",
    "InterferenceGraph",
    "REGIME_INTERFERENCE",
    "REGIME_NO_INTERFERENCE",
    "dmt_theorem1",
    "dmt_theorem2_lower",
    "dmt_upper_bound",
    "lp_oracle_ni",
    "fit_diversity_slope",
    "monte_carlo_outage",
    "hamiltonian_relay_order",
    "__version__",
]
