"""Terminal tables, CSV and JSON output for command results."""

import json
import math
import sys
from pathlib import Path
from typing import Any, Optional, TextIO, Union

import pandas as pd
from rich.console import Console
from rich.table import Table

from src.analysis.mixed import ExactReport
from src.oracle.generator import VerificationSummary
from src.simulation.comparison import Comparison
from src.simulation.simulator import SimulationReport

FLOAT_FORMAT = "%.12g"


def _fmt(value: Optional[float], digits: int = 4) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.{digits}f}"


def exact_frame(report: ExactReport) -> pd.DataFrame:
    """One row per metric of an exact report."""
    rows = [("normalizer", report.normalizer.to_float(strict=False)), ("loading", report.loading)]
    rows.extend(report.metric_values().items())
    for j, user in enumerate(report.users, start=1):
        rows.append((f"user{j}.throughput", user.throughput))
    rows.append(("mean_busy", report.mean_busy))
    return pd.DataFrame(rows, columns=["metric", "value"])


def render_exact(report: ExactReport, console: Console) -> None:
    """Success probabilities, state probabilities and busy distribution."""
    summary = Table(title="Success probabilities (exact)")
    summary.add_column("Metric", style="cyan")
    summary.add_column("Value", style="green", justify="right")
    summary.add_row("Normalizer", f"{report.normalizer.to_float(strict=False):.6e}")
    summary.add_row("Loading rho", _fmt(report.loading))
    if report.phi_0 is not None:
        summary.add_row("phi_0", _fmt(report.phi_0))
    for j, user in enumerate(report.users, start=1):
        summary.add_row(f"phi_{j}", _fmt(user.success_ratio))
    summary.add_row("Mean busy channels", _fmt(report.mean_busy))
    console.print(summary)
    if report.phi_0 is None:
        console.print("phi_0 omitted: the scenario has no non-persistent classes.")

    if report.users:
        states = Table(title="Persistent user state probabilities")
        for name in ("User", "P[I]", "P[W]", "P[T]", "gamma"):
            states.add_column(name, justify="right")
        for j, user in enumerate(report.users, start=1):
            states.add_row(str(j), _fmt(user.p_idle), _fmt(user.p_wait), _fmt(user.p_transmit), _fmt(user.throughput))
        console.print(states)
        for j, user in enumerate(report.users, start=1):
            if user.warning:
                console.print(f"[yellow]user {j}: {user.warning}[/yellow]")

    if report.class_rates:
        classes = Table(title="Non-persistent classes")
        for name in ("Class", "lambda", "Accepted", "Dropped"):
            classes.add_column(name, justify="right")
        for i, rates in enumerate(report.class_rates, start=1):
            classes.add_row(str(i), _fmt(rates.arrival_rate), _fmt(rates.accepted), _fmt(rates.dropped))
        console.print(classes)

    busy = Table(title="Busy channels")
    busy.add_column("b", justify="right")
    busy.add_column("P[b busy]", justify="right")
    for b, p in enumerate(report.busy.probabilities):
        busy.add_row(str(b), f"{p:.6f}")
    console.print(busy)


def render_comparison(comparison: Comparison, sim: SimulationReport, console: Console) -> None:
    """Simulated against exact values, one row per metric."""
    table = Table(title=f"Simulated vs exact ({sim.transitions} transitions, seed {sim.seed})")
    table.add_column("Metric", style="cyan")
    table.add_column("Simulated", justify="right")
    table.add_column("Exact", justify="right")
    table.add_column("|diff|", justify="right")
    for row in comparison.rows:
        table.add_row(row.metric, _fmt(row.simulated), _fmt(row.exact), f"{row.difference:.4f}")
    console.print(table)

    if sim.class_attempts:
        counters = Table(title="Non-persistent attempts")
        for name in ("Class", "Attempts", "Successes", "Ratio"):
            counters.add_column(name, justify="right")
        for i, (tried, won, ratio) in enumerate(
            zip(sim.class_attempts, sim.class_successes, sim.class_ratios()), start=1
        ):
            counters.add_row(str(i), str(tried), str(won), _fmt(ratio))
        counters.add_row("all", str(sim.attempts), str(sim.successes), _fmt(sim.phi_0))
        console.print(counters)
    if sim.phi_0_stderr is not None:
        console.print(f"phi_0 batch-means standard error: {sim.phi_0_stderr:.2e}")


def render_verification(summary: VerificationSummary, console: Console) -> None:
    table = Table(title="Oracle verification")
    table.add_column("Check", style="cyan")
    table.add_column("Value", justify="right")
    table.add_row("States", str(summary.states))
    table.add_row("Max global-balance residual", f"{summary.global_residual:.3e}")
    table.add_row("Max detailed-balance residual", f"{summary.detailed_residual:.3e}")
    table.add_row("Detailed-balance violations", str(summary.violations))
    table.add_row("Max |product form - oracle|", f"{summary.product_form_discrepancy:.3e}")
    if summary.coefficient_discrepancy is None:
        table.add_row("Max relative c_b error", "-")
    else:
        table.add_row("Max relative c_b error", f"{summary.coefficient_discrepancy:.3e}")
    console.print(table)


def render_frame(frame: pd.DataFrame, console: Console, title: Optional[str] = None) -> None:
    """Any data frame as a rich table."""
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column), justify="right")
    for record in frame.itertuples(index=False):
        table.add_row(*[
            _fmt(v, 6) if isinstance(v, float) else str(v) for v in record
        ])
    console.print(table)


def write_csv(frame: pd.DataFrame, target: Union[str, Path, TextIO, None] = None) -> None:
    """Deterministic CSV: fixed float format, headers always written."""
    if target is None:
        target = sys.stdout
    frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


def write_json(payload: Any, stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(payload, indent=2, default=str))
    stream.write("\n")
