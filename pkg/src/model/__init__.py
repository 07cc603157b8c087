"""Core model types: success profiles and scenarios."""

from .profile import (
    SuccessProfile,
    sample_scan_success,
    scan_success_profile,
    validate_profile,
)
from .scenario import (
    NonPersistentClass,
    PersistentUser,
    Scenario,
    load_scenario,
    loading,
    scenario_from_dict,
)

__all__ = [
    "SuccessProfile",
    "sample_scan_success",
    "scan_success_profile",
    "validate_profile",
    "NonPersistentClass",
    "PersistentUser",
    "Scenario",
    "load_scenario",
    "loading",
    "scenario_from_dict",
]
