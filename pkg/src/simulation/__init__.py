"""Discrete-event simulation and comparison against exact results."""

from .simulator import SimulationConfig, SimulationReport, UserEstimate, run
from .comparison import Comparison, ComparisonRow, compare

__all__ = [
    "SimulationConfig",
    "SimulationReport",
    "UserEstimate",
    "run",
    "Comparison",
    "ComparisonRow",
    "compare",
]
