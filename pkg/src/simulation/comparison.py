"""Side-by-side comparison of simulated and exact metrics."""

from dataclasses import dataclass
from typing import List, Optional, Union

import pandas as pd
import structlog

from src.analysis.mixed import ExactReport
from src.common.exceptions import ComparisonError
from .simulator import SimulationReport

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ComparisonRow:
    """One metric in both reports."""

    metric: str
    simulated: float
    exact: float

    @property
    def difference(self) -> float:
        """Absolute difference |simulated - exact|."""
        return abs(self.simulated - self.exact)


@dataclass(frozen=True)
class Comparison:
    """Ordered comparison rows of one scenario."""

    rows: List[ComparisonRow]

    @property
    def max_difference(self) -> float:
        return max((row.difference for row in self.rows), default=0.0)

    def row(self, metric: str) -> Optional[ComparisonRow]:
        return next((r for r in self.rows if r.metric == metric), None)

    def to_frame(self) -> pd.DataFrame:
        """Table with columns metric, simulated, exact, difference."""
        return pd.DataFrame(
            [(r.metric, r.simulated, r.exact, r.difference) for r in self.rows],
            columns=["metric", "simulated", "exact", "difference"],
        )


def compare(
    exact: ExactReport,
    sim: Union[SimulationReport, ExactReport],
) -> Comparison:
    """Pair every metric of the exact report with its simulated estimate.

    Rows follow the exact report's order: phi_0, then per-user P[I], P[W],
    P[T] and phi, then the busy-channel histogram. Metrics without a
    simulated estimate (a user that never attempted) are left out.

    Raises:
        ComparisonError: If the reports come from different scenarios
    """
    if exact.scenario_fingerprint != sim.scenario_fingerprint:
        raise ComparisonError(
            f"reports describe different scenarios "
            f"({exact.scenario_fingerprint[:12]} vs {sim.scenario_fingerprint[:12]})"
        )
    simulated = sim.metric_values()
    rows = [
        ComparisonRow(metric, simulated[metric], value)
        for metric, value in exact.metric_values().items()
        if metric in simulated
    ]
    comparison = Comparison(rows)
    logger.debug("reports_compared", rows=len(rows), max_difference=comparison.max_difference)
    return comparison
