"""Cournot competition on bipartite firm-market networks.

Closed-form equilibria, welfare sensitivities, centrality rankings and greedy
budgeted supply-shock policies, plus a command line driver (``netcournot``).
"""

from netcournot.equilibrium import EquilibriumModel, best_response_oracle, equilibrium, outcome, social_welfare
from netcournot.exceptions import (
    ConvergenceError,
    NetCournotError,
    NetworkError,
    ParameterError,
    SingularSystemError,
)
from netcournot.network import GameParams, MarketNetwork, generate_synthetic, load_network, write_network
from netcournot.policy import STRATEGIES, Strategy, allocate, check_feasibility, run_strategy
from netcournot.sensitivity import jacobian, zeta_gradient, zeta_paper
from netcournot.sweep import SweepConfig, run_sweep

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "EquilibriumModel",
    "GameParams",
    "MarketNetwork",
    "NetCournotError",
    "NetworkError",
    "ParameterError",
    "STRATEGIES",
    "SingularSystemError",
    "Strategy",
    "SweepConfig",
    "allocate",
    "best_response_oracle",
    "check_feasibility",
    "equilibrium",
    "generate_synthetic",
    "jacobian",
    "load_network",
    "outcome",
    "run_strategy",
    "run_sweep",
    "social_welfare",
    "write_network",
    "zeta_gradient",
    "zeta_paper",
]
