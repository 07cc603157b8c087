"""Subcommand implementations.

Each command loads its input, runs the library call and renders the
result; errors propagate to ``src.main`` which maps them to exit codes.
"""

import asyncio
from pathlib import Path
from typing import Optional, Union

import pandas as pd
import structlog
from rich.console import Console

from src.analysis.mixed import full_report
from src.common.config import AppConfig
from src.common.types import OutputFormat
from src.model.scenario import load_scenario
from src.oracle.generator import verify_scenario
from src.simulation.comparison import compare
from src.simulation.simulator import SimulationConfig, run
from .rendering import (
    exact_frame,
    render_comparison,
    render_exact,
    render_frame,
    render_verification,
    write_csv,
    write_json,
)
from .sweep import load_sweep_spec, run_sweep

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]


def cmd_exact(
    scenario_path: PathLike,
    config: AppConfig,
    fmt: OutputFormat = OutputFormat.TABLE,
    csv_path: Optional[PathLike] = None,
    console: Optional[Console] = None,
) -> int:
    """Exact analysis of a scenario file."""
    scenario = load_scenario(scenario_path)
    report = full_report(scenario, config.numerics)
    frame = exact_frame(report)
    if fmt is OutputFormat.JSON:
        write_json(report.to_dict())
    elif fmt is OutputFormat.CSV:
        write_csv(frame)
    else:
        render_exact(report, console or Console())
    if csv_path:
        write_csv(frame, csv_path)
    return 0


def cmd_simulate(
    scenario_path: PathLike,
    config: AppConfig,
    transitions: Optional[int] = None,
    seed: Optional[int] = None,
    fmt: OutputFormat = OutputFormat.TABLE,
    csv_path: Optional[PathLike] = None,
    console: Optional[Console] = None,
) -> int:
    """Simulate a scenario and compare with the exact analysis."""
    scenario = load_scenario(scenario_path)
    settings = config.simulation
    sim_config = SimulationConfig(
        scenario=scenario,
        transitions=transitions if transitions is not None else settings.transitions,
        seed=seed if seed is not None else settings.seed,
        batches=settings.batches,
        block_size=settings.block_size,
    )
    exact = full_report(scenario, config.numerics)
    sim = run(sim_config)
    comparison = compare(exact, sim)
    frame = comparison.to_frame()
    if fmt is OutputFormat.JSON:
        write_json({
            "simulation": sim.to_dict(),
            "comparison": frame.to_dict(orient="records"),
        })
    elif fmt is OutputFormat.CSV:
        write_csv(frame)
    else:
        render_comparison(comparison, sim, console or Console())
    if csv_path:
        write_csv(frame, csv_path)
    return 0


def cmd_verify(
    scenario_path: PathLike,
    config: AppConfig,
    fmt: OutputFormat = OutputFormat.TABLE,
    console: Optional[Console] = None,
) -> int:
    """Check the product form against the brute-force oracle.

    Returns:
        int: 0 when every residual is within the balance tolerance, 1 otherwise
    """
    scenario = load_scenario(scenario_path)
    summary = verify_scenario(scenario, config.oracle, config.numerics)
    if fmt is OutputFormat.JSON:
        write_json(summary.to_dict())
    elif fmt is OutputFormat.CSV:
        write_csv(pd.DataFrame([summary.to_dict()]))
    else:
        render_verification(summary, console or Console())
    passed = summary.passed(config.oracle.balance_tolerance, config.oracle.coefficient_tolerance)
    return 0 if passed else 1


def cmd_sweep(
    spec_path: PathLike,
    config: AppConfig,
    fmt: OutputFormat = OutputFormat.TABLE,
    csv_path: Optional[PathLike] = None,
    console: Optional[Console] = None,
) -> int:
    """Run a sweep and write its CSV."""
    loaded = load_sweep_spec(spec_path)
    frame = asyncio.run(
        run_sweep(loaded, config.numerics, max_concurrency=config.sweep.max_concurrency)
    )
    target = csv_path or loaded.output
    if target:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        write_csv(frame, target)
        logger.info("sweep_written", path=str(target), rows=len(frame))
    if fmt is OutputFormat.JSON:
        write_json(frame.to_dict(orient="records"))
    elif fmt is OutputFormat.CSV:
        write_csv(frame)
    else:
        render_frame(frame, console or Console(), title=f"Sweep over {loaded.spec.sweep.variable.value}")
    return 0
