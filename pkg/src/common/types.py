"""Common type definitions for the multi-access toolkit.

This module contains shared enums used across the model, oracle,
simulation and command-line components.
"""

from enum import Enum
from typing import Union


class ActivityState(Enum):
    """Activity state of a persistent user."""

    IDLE = 0          # No file to send
    WAITING = 1       # Holding a file, attempting access at rate u
    TRANSMITTING = 2  # Occupying one channel

    @property
    def code(self) -> str:
        """Return the one-letter code used in tables (I, W, T)."""
        return self.name[0]

    def __str__(self) -> str:
        """Return string representation."""
        return self.code

    @classmethod
    def parse(cls, value: Union["ActivityState", str, int]) -> "ActivityState":
        """Accept an ActivityState, a one-letter code or its integer value."""
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            for state in cls:
                if state.code == value.upper() or state.name == value.upper():
                    return state
            raise ValueError(f"unknown activity state {value!r}")
        return cls(value)


class ActivityCycle(Enum):
    """Where a persistent user goes after finishing a transmission."""

    RETURN_TO_WAITING = "return_to_waiting"  # T -> W, the reversible model
    RETURN_TO_IDLE = "return_to_idle"        # T -> I, not reversible


class SweepVariable(Enum):
    """Scenario parameter varied by a sweep."""

    SCAN = "s"
    LOADING = "rho"
    CHANNELS = "m"


class OutputFormat(Enum):
    """Output rendering for command results."""

    TABLE = "table"
    CSV = "csv"
    JSON = "json"
