"""Exact product-form analysis.

This module provides:
- Closed-form results for the all non-persistent system
- Normalizing constants and per-user metrics for the mixed system
"""

from .nonpersistent import (
    BusyDistribution,
    ClassThroughput,
    busy_distribution,
    erlang_b,
    normalizer_A,
    state_mass,
    success_probability,
)
from .mixed import (
    ExactReport,
    MixedAnalyzer,
    PersistentMetrics,
    aggregated_mass,
    busy_channel_distribution,
    coefficients_c,
    full_report,
    idle_probability,
    joint_mass,
    nonpersistent_success,
    normalizer_B,
    persistent_metrics,
)

__all__ = [
    "BusyDistribution",
    "ClassThroughput",
    "busy_distribution",
    "erlang_b",
    "normalizer_A",
    "state_mass",
    "success_probability",
    "ExactReport",
    "MixedAnalyzer",
    "PersistentMetrics",
    "aggregated_mass",
    "busy_channel_distribution",
    "coefficients_c",
    "full_report",
    "idle_probability",
    "joint_mass",
    "nonpersistent_success",
    "normalizer_B",
    "persistent_metrics",
]
