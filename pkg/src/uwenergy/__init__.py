"""Energy-efficient transmission over underwater acoustic links.

The package models a single source/destination acoustic link, reduces the
energy-per-successful-bit minimization to two variables at the power-optimal
carrier frequency, solves it through a four-case KKT analysis, and checks the
result against brute-force oracles and a Monte Carlo delivery simulator.
"""

from uwenergy.channel import ChannelEnv, LinkPoint
from uwenergy.errors import BracketError, DomainError, StationarityError
from uwenergy.frequency import DerivedConstants, derive_constants, optimal_frequency
from uwenergy.kkt import KktSolution, solve
from uwenergy.objective import DesignPoint, ProblemInstance
from uwenergy.oracle import OracleResult, minimize_original, minimize_reduced
from uwenergy.simulator import SimConfig, SimReport, simulate

__all__ = [
    "BracketError",
    "ChannelEnv",
    "DerivedConstants",
    "DesignPoint",
    "DomainError",
    "KktSolution",
    "LinkPoint",
    "OracleResult",
    "ProblemInstance",
    "SimConfig",
    "SimReport",
    "StationarityError",
    "derive_constants",
    "minimize_original",
    "minimize_reduced",
    "optimal_frequency",
    "simulate",
    "solve",
]
