"""Parameter sweeps over scan width, loading or channel count."""

import asyncio
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator

from src.analysis.mixed import MixedAnalyzer
from src.analysis.nonpersistent import normalizer_A, success_probability
from src.common.config import NumericsConfig
from src.common.exceptions import ConditioningError, InvalidParameterError, ScenarioSchemaError
from src.common.types import SweepVariable
from src.model.scenario import Scenario, read_json_file, scenario_from_dict

logger = structlog.get_logger(__name__)


class SweepAxis(BaseModel):
    """A variable and the values it takes."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    variable: SweepVariable
    values: List[float] = Field(..., min_length=1)


class SweepSpec(BaseModel):
    """Sweep file contents.

    ``scenario`` is a path (relative to the sweep file) or an inline
    scenario object; ``series`` adds an outer axis giving one curve per value.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: Union[str, Dict[str, Any]]
    sweep: SweepAxis
    series: Optional[SweepAxis] = None
    output: Optional[str] = None

    @field_validator("series")
    @classmethod
    def validate_series(cls, v: Optional[SweepAxis], info: ValidationInfo) -> Optional[SweepAxis]:
        """Series and sweep must vary different parameters."""
        sweep = info.data.get("sweep")
        if v is not None and sweep is not None and v.variable == sweep.variable:
            raise ValueError("series variable must differ from the swept variable")
        return v


class LoadedSweep:
    """A validated sweep spec with its resolved base scenario."""

    def __init__(self, spec: SweepSpec, base: Scenario, output: Optional[Path]):
        self.spec = spec
        self.base = base
        self.output = output


def load_sweep_spec(path: Union[str, Path]) -> LoadedSweep:
    """Read a sweep file and resolve its base scenario.

    Raises:
        ScenarioSchemaError: For unreadable or invalid sweep or scenario files
    """
    path = Path(path)
    raw = read_json_file(path)
    try:
        spec = SweepSpec.model_validate(raw)
    except ValidationError as e:
        details = [
            f"{'.'.join(str(p) for p in err.get('loc', ())) or '<root>'}: {err.get('msg')}"
            for err in e.errors()
        ]
        raise ScenarioSchemaError("sweep validation failed", path=str(path), details=details)

    if isinstance(spec.scenario, str):
        scenario_path = Path(spec.scenario)
        if not scenario_path.is_absolute():
            scenario_path = path.parent / scenario_path
        base = scenario_from_dict(read_json_file(scenario_path), source=str(scenario_path))
    else:
        base = scenario_from_dict(spec.scenario, source=f"{path}#scenario")

    output = None
    if spec.output:
        output = Path(spec.output)
        if not output.is_absolute():
            output = path.parent / output
    return LoadedSweep(spec=spec, base=base, output=output)


def _as_count(value: float, name: str) -> int:
    if not float(value).is_integer():
        raise InvalidParameterError(f"{name} must be an integer, got {value}")
    return int(value)


def apply_value(base: Scenario, variable: SweepVariable, value: float) -> Scenario:
    """Scenario with one parameter replaced.

    A loading value replaces the class list by the single class
    (lambda = rho, mu = 1), which leaves every metric unchanged for the
    same total loading.

    Raises:
        InvalidParameterError: If the value is not valid for the scenario
    """
    if variable is SweepVariable.SCAN:
        changes: Dict[str, Any] = {"scan": _as_count(value, "scan width"), "theta": None}
    elif variable is SweepVariable.CHANNELS:
        changes = {"channels": _as_count(value, "channel count")}
    else:
        if not (math.isfinite(value) and value >= 0):
            raise InvalidParameterError(f"loading must be non-negative, got {value}")
        changes = {"non_persistent_classes": [{"lambda": value, "mu": 1.0}] if value > 0 else []}
    try:
        return base.replace(**changes)
    except ValidationError as e:
        raise InvalidParameterError(
            "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'scenario'}: {err['msg']}" for err in e.errors())
        )


def evaluate_point(scenario: Scenario, numerics: Optional[NumericsConfig] = None) -> Dict[str, Any]:
    """phi, normalizer and per-user success ratios of one sweep point.

    Non-persistent-only scenarios use the closed-form success probability;
    mixed scenarios use phi_0 (left empty without classes).
    """
    row: Dict[str, Any] = {}
    if scenario.n == 0:
        row["phi"] = success_probability(scenario.profile, scenario.rho)
        row["normalizer"] = normalizer_A(scenario.profile, scenario.rho).to_float(strict=False)
        return row
    analyzer = MixedAnalyzer(scenario, numerics)
    row["phi"] = analyzer.phi_0 if scenario.k > 0 else math.nan
    row["normalizer"] = analyzer.normalizer.to_float(strict=False)
    for j in range(1, scenario.n + 1):
        row[f"phi_{j}"] = analyzer.persistent_metrics(j).success_ratio
    return row


def _point_scenario(loaded: LoadedSweep, series_value: Optional[float], value: float) -> Scenario:
    scenario = loaded.base
    if loaded.spec.series is not None:
        scenario = apply_value(scenario, loaded.spec.series.variable, series_value)
    return apply_value(scenario, loaded.spec.sweep.variable, value)


async def run_sweep(
    loaded: LoadedSweep,
    numerics: Optional[NumericsConfig] = None,
    max_concurrency: int = 4,
) -> pd.DataFrame:
    """Evaluate every sweep point and collect the CSV rows.

    Points run in worker threads, at most ``max_concurrency`` at a time.
    Rows keep input order; invalid values and points whose coefficients
    cannot be recovered are logged and skipped.

    Returns:
        pd.DataFrame: Columns [series_variable, series_value,] swept_variable,
            value, phi, normalizer and phi_j per persistent user
    """
    spec = loaded.spec
    semaphore = asyncio.Semaphore(max_concurrency)
    series_values: List[Optional[float]] = list(spec.series.values) if spec.series else [None]
    points = [(s, v) for s in series_values for v in spec.sweep.values]

    async def evaluate(series_value: Optional[float], value: float) -> Optional[Dict[str, Any]]:
        async with semaphore:
            try:
                scenario = _point_scenario(loaded, series_value, value)
                result = await asyncio.to_thread(evaluate_point, scenario, numerics)
            except InvalidParameterError as e:
                logger.warning(
                    "sweep_value_rejected",
                    variable=spec.sweep.variable.value,
                    value=value,
                    series_value=series_value,
                    reason=str(e),
                )
                return None
            except ConditioningError as e:
                logger.warning(
                    "sweep_point_failed",
                    variable=spec.sweep.variable.value,
                    value=value,
                    series_value=series_value,
                    reason=str(e),
                )
                return None
        row: Dict[str, Any] = {}
        if spec.series is not None:
            row["series_variable"] = spec.series.variable.value
            row["series_value"] = series_value
        row["swept_variable"] = spec.sweep.variable.value
        row["value"] = value
        row.update(result)
        return row

    results = await asyncio.gather(*(evaluate(s, v) for s, v in points))
    rows = [r for r in results if r is not None]
    columns = (["series_variable", "series_value"] if spec.series else []) + [
        "swept_variable", "value", "phi", "normalizer"
    ] + [f"phi_{j}" for j in range(1, loaded.base.n + 1)]
    logger.info("sweep_finished", points=len(points), rows=len(rows))
    return pd.DataFrame(rows, columns=columns)
