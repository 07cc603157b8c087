"""Command-line surface of the toolkit.

This module provides:
- Subcommands for exact analysis, simulation, oracle verification and sweeps
- Rich table, CSV and JSON rendering of their results
- Sweep file loading and concurrent sweep evaluation
"""

from .commands import cmd_exact, cmd_simulate, cmd_sweep, cmd_verify
from .rendering import exact_frame, write_csv, write_json
from .sweep import LoadedSweep, SweepAxis, SweepSpec, apply_value, evaluate_point, load_sweep_spec, run_sweep

__all__ = [
    "cmd_exact",
    "cmd_simulate",
    "cmd_sweep",
    "cmd_verify",
    "exact_frame",
    "write_csv",
    "write_json",
    "LoadedSweep",
    "SweepAxis",
    "SweepSpec",
    "apply_value",
    "evaluate_point",
    "load_sweep_spec",
    "run_sweep",
]
