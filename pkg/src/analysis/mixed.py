"""Exact steady state of the combined persistent and non-persistent system.

The unnormalized weight of y busy channels is

    u(y) = T(y) * sum_{b <= min(y, g)} rho^(y-b)/(y-b)! * c_b

with T(y) = prod_{r<y} theta(r), g = min(n, m) and c_b the coefficients of
prod_j (1 + alpha_j/beta_j + z * alpha_j u_j / (beta_j v_j)). B is the
reciprocal of sum_y u(y). The idle probability of user j uses the same sum
with the leave-one-out coefficients c_{j,b} of the other n-1 users.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import structlog

from src.common.config import NumericsConfig
from src.common.exceptions import (
    InvalidParameterError,
    InvalidStateError,
    UndefinedMetricError,
)
from src.common.types import ActivityState
from src.model.scenario import PersistentUser, Scenario
from src.numeric.dft import extract_coefficients, factors_for
from src.numeric.scaled import ScaledComplex, ScaledVector
from .nonpersistent import (
    BusyDistribution,
    ClassThroughput,
    class_throughput,
    poisson_weights,
    success_products,
)

logger = structlog.get_logger(__name__)

WAITING_WARNING_THRESHOLD = 1e-12


@dataclass(frozen=True)
class PersistentMetrics:
    """Steady-state metrics of one persistent user.

    Attributes:
        p_idle: P[I_j]
        p_wait: P[W_j] = P[I_j] alpha_j / beta_j
        p_transmit: P[T_j] = 1 - P[I_j] (1 + alpha_j / beta_j)
        throughput: gamma_j = P[T_j] v_j
        success_ratio: phi_j = gamma_j / (P[W_j] u_j)
        warning: Set when P[W_j] is too small for a reliable ratio
    """

    p_idle: float
    p_wait: float
    p_transmit: float
    throughput: float
    success_ratio: float
    warning: Optional[str] = None

    def __post_init__(self):
        """Check the three state probabilities."""
        total = self.p_idle + self.p_wait + self.p_transmit
        if abs(total - 1.0) > 1e-9:
            raise InvalidParameterError(f"state probabilities sum to {total}, not 1")
        if self.warning is None and not (-1e-9 <= self.success_ratio <= 1.0 + 1e-9):
            raise InvalidParameterError(f"success ratio {self.success_ratio} outside [0, 1]")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_idle": self.p_idle,
            "p_wait": self.p_wait,
            "p_transmit": self.p_transmit,
            "throughput": self.throughput,
            "success_ratio": self.success_ratio,
            "warning": self.warning,
        }


@dataclass(frozen=True)
class ExactReport:
    """All exact steady-state outputs of a scenario."""

    scenario_fingerprint: str
    channels: int
    loading: float
    normalizer: ScaledComplex
    busy: BusyDistribution
    phi_0: Optional[float]
    class_rates: Tuple[ClassThroughput, ...]
    users: Tuple[PersistentMetrics, ...]
    coefficients: ScaledVector = field(repr=False)
    leave_one_out: Tuple[ScaledVector, ...] = field(repr=False)

    @property
    def mean_busy(self) -> float:
        return self.busy.mean

    def metric_values(self) -> Dict[str, float]:
        """Probability metrics keyed the same way as a simulation report."""
        values: Dict[str, float] = {}
        if self.phi_0 is not None:
            values["phi_0"] = self.phi_0
        for j, user in enumerate(self.users, start=1):
            values[f"user{j}.p_idle"] = user.p_idle
            values[f"user{j}.p_wait"] = user.p_wait
            values[f"user{j}.p_transmit"] = user.p_transmit
            values[f"user{j}.phi"] = user.success_ratio
        for y, p in enumerate(self.busy.probabilities):
            values[f"busy[{y}]"] = p
        return values

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready rendering."""
        return {
            "scenario_fingerprint": self.scenario_fingerprint,
            "channels": self.channels,
            "loading": self.loading,
            "normalizer": self.normalizer.to_float(strict=False),
            "log10_normalizer": self.normalizer.log10(),
            "phi_0": self.phi_0,
            "mean_busy": self.mean_busy,
            "busy_distribution": list(self.busy.probabilities),
            "classes": [
                {"lambda": c.arrival_rate, "accepted": c.accepted, "dropped": c.dropped}
                for c in self.class_rates
            ],
            "users": [u.to_dict() for u in self.users],
            "coefficients": [v.to_float(strict=False) for v in self.coefficients],
        }


class MixedAnalyzer:
    """Exact analysis of one scenario with intermediate results cached.

    Coefficient vectors, busy weights and leave-one-out sums are computed
    once and shared by every metric. Leave-one-out coefficients are keyed by
    the user's parameter tuple so identical users share one transform.
    """

    def __init__(self, scenario: Scenario, numerics: Optional[NumericsConfig] = None):
        self.scenario = scenario
        self.numerics = numerics or NumericsConfig()
        self.profile = scenario.profile
        self.m = scenario.channels
        self.rho = scenario.rho
        self._loo_cache: Dict[Tuple[float, ...], ScaledVector] = {}

    def _extract(self, users: Sequence[PersistentUser], wanted: int) -> ScaledVector:
        return extract_coefficients(
            factors_for(users),
            wanted,
            imag_rel_tol=self.numerics.imag_rel_tol,
            imag_abs_tol=self.numerics.imag_abs_tol,
            acceptance_window=self.numerics.acceptance_window,
        )

    @property
    def g(self) -> int:
        return min(self.scenario.n, self.m)

    @cached_property
    def coefficients(self) -> ScaledVector:
        """c_0..c_g from n+1 transform points."""
        return self._extract(self.scenario.users, self.g + 1)

    def leave_one_out(self, j: int) -> ScaledVector:
        """c_{j,0}..c_{j,min(n-1,m)} for the 1-based user index j."""
        user = self._user(j)
        key = user.key()
        if key not in self._loo_cache:
            others = [u for i, u in enumerate(self.scenario.users, start=1) if i != j]
            self._loo_cache[key] = self._extract(others, min(self.scenario.n - 1, self.m) + 1)
        return self._loo_cache[key]

    @cached_property
    def _products(self) -> ScaledVector:
        return success_products(self.profile)

    @cached_property
    def _poisson(self) -> ScaledVector:
        return poisson_weights(self.rho, self.m + 1)

    def busy_weights_for(self, coefficients: ScaledVector, general: bool = False) -> ScaledVector:
        """T(y) * sum_b rho^(y-b)/(y-b)! c_b for y = 0..m.

        Without non-persistent classes the explicit rho = 0 form T(y) c_y is
        used unless ``general`` asks for the full double sum.
        """
        size = self.m + 1
        if self.scenario.k == 0 and not general:
            # no non-persistent classes: only the x = 0 term survives
            mantissa = np.zeros(size)
            exponent = np.zeros(size, dtype=np.int64)
            top = min(len(coefficients), size)
            mantissa[:top] = coefficients.mantissa[:top].real
            exponent[:top] = coefficients.exponent[:top]
            mixed = ScaledVector(mantissa, exponent)
        else:
            entries = []
            for y in range(size):
                reach = min(y, len(coefficients) - 1)
                window = slice(y - reach, y + 1)
                poisson = self._poisson[window]
                terms = ScaledVector(
                    poisson.mantissa[::-1] * coefficients.mantissa[: reach + 1].real,
                    poisson.exponent[::-1] + coefficients.exponent[: reach + 1],
                )
                entries.append(terms.total())
            mixed = ScaledVector.from_scalars(entries).real
        return mixed * self._products[: self.m + 1]

    @cached_property
    def busy_weights(self) -> ScaledVector:
        return self.busy_weights_for(self.coefficients)

    @cached_property
    def total_weight(self) -> ScaledComplex:
        return self.busy_weights.total()

    @cached_property
    def normalizer(self) -> ScaledComplex:
        """B = 1 / sum_y u(y)."""
        return ScaledComplex.one() / self.total_weight

    @cached_property
    def busy_distribution(self) -> BusyDistribution:
        probabilities = self.busy_weights.relative_to(self.total_weight).real
        return BusyDistribution(tuple(probabilities.tolist()), self.normalizer)

    @cached_property
    def phi_0(self) -> float:
        if self.scenario.k == 0:
            raise UndefinedMetricError("phi_0 is undefined without non-persistent classes")
        theta = ScaledVector(list(self.profile.theta))
        accepted = (self.busy_weights * theta).total()
        return float((accepted / self.total_weight).to_float())

    def _user(self, j: int) -> PersistentUser:
        if isinstance(j, bool) or not isinstance(j, (int, np.integer)) or not 1 <= j <= self.scenario.n:
            raise InvalidParameterError(f"user index must be in 1..{self.scenario.n}, got {j!r}")
        return self.scenario.users[j - 1]

    def idle_probability(self, j: int) -> float:
        """P[I_j] from the leave-one-out busy weights."""
        weights = self.busy_weights_for(self.leave_one_out(j))
        return float((weights.total() / self.total_weight).to_float())

    def persistent_metrics(self, j: int) -> PersistentMetrics:
        user = self._user(j)
        p_idle = self.idle_probability(j)
        p_wait = p_idle * user.wait_ratio
        p_transmit = 1.0 - p_idle * (1.0 + user.wait_ratio)
        if -1e-12 < p_transmit < 0:
            p_transmit = 0.0
        throughput = p_transmit * user.v
        warning = None
        if p_wait < WAITING_WARNING_THRESHOLD:
            warning = f"P[W_{j}]={p_wait:.3e} is near zero; success ratio is unreliable"
            logger.warning("waiting_probability_near_zero", user=j, p_wait=p_wait)
        success_ratio = throughput / (p_wait * user.u) if p_wait > 0 else math.nan
        return PersistentMetrics(p_idle, p_wait, p_transmit, throughput, success_ratio, warning)

    def _activity_weight(self, a: Sequence[Any]) -> Tuple[ScaledComplex, int]:
        if len(a) != self.scenario.n:
            raise InvalidStateError(f"activity vector needs {self.scenario.n} entries, got {len(a)}")
        weight = ScaledComplex.one()
        transmitters = 0
        for user, raw in zip(self.scenario.users, a):
            try:
                state = ActivityState.parse(raw)
            except ValueError as e:
                raise InvalidStateError(str(e))
            if state is ActivityState.WAITING:
                weight = weight * user.wait_ratio
            elif state is ActivityState.TRANSMITTING:
                weight = weight * user.transmit_ratio
                transmitters += 1
        return weight, transmitters

    def aggregated_mass(self, x: int, a: Sequence[Any]) -> float:
        """q(x; a) with x the total number of non-persistent transmitters."""
        if isinstance(x, bool) or int(x) != x or x < 0:
            raise InvalidStateError(f"non-persistent count must be a non-negative integer, got {x!r}")
        x = int(x)
        if x > 0 and self.scenario.k == 0:
            raise InvalidStateError("no non-persistent classes, count must be 0")
        weight, transmitters = self._activity_weight(a)
        if x + transmitters > self.m:
            raise InvalidStateError(f"{x + transmitters} busy channels exceed {self.m}")
        weight = weight * self._products[x + transmitters] * self._poisson[x]
        return float((weight * self.normalizer).to_float())

    def joint_mass(self, x: Sequence[int], a: Sequence[Any]) -> float:
        """p(x; a) for a per-class occupancy vector x."""
        if len(x) != self.scenario.k:
            raise InvalidStateError(f"occupancy vector needs {self.scenario.k} entries, got {len(x)}")
        counts = []
        for value in x:
            if isinstance(value, bool) or int(value) != value or value < 0:
                raise InvalidStateError(f"occupancy entries must be non-negative integers, got {value!r}")
            counts.append(int(value))
        weight, transmitters = self._activity_weight(a)
        busy = sum(counts) + transmitters
        if busy > self.m:
            raise InvalidStateError(f"{busy} busy channels exceed {self.m}")
        weight = weight * self._products[busy]
        for count, cls in zip(counts, self.scenario.classes):
            weight = weight * poisson_weights(cls.rho, count + 1)[count]
        return float((weight * self.normalizer).to_float())

    def report(self) -> ExactReport:
        """Assemble every metric; users are evaluated in index order."""
        users = tuple(self.persistent_metrics(j) for j in range(1, self.scenario.n + 1))
        phi_0 = self.phi_0 if self.scenario.k > 0 else None
        report = ExactReport(
            scenario_fingerprint=self.scenario.fingerprint(),
            channels=self.m,
            loading=self.rho,
            normalizer=self.normalizer,
            busy=self.busy_distribution,
            phi_0=phi_0,
            class_rates=class_throughput(self.scenario.classes, phi_0) if phi_0 is not None else (),
            users=users,
            coefficients=self.coefficients,
            leave_one_out=tuple(self.leave_one_out(j) for j in range(1, self.scenario.n + 1)),
        )
        logger.info(
            "exact_report_computed",
            channels=self.m,
            classes=self.scenario.k,
            users=self.scenario.n,
            phi_0=phi_0,
        )
        return report


def coefficients_c(
    users: Sequence[PersistentUser],
    limit: Optional[int] = None,
    numerics: Optional[NumericsConfig] = None,
) -> ScaledVector:
    """Coefficients c_0..c_g of the persistent-user polynomial.

    Args:
        users: The n persistent users
        limit: Highest index g to return (defaults to n)
        numerics: Tolerances for the transform

    Returns:
        ScaledVector: c_0..c_g
    """
    numerics = numerics or NumericsConfig()
    n = len(users)
    g = n if limit is None else min(int(limit), n)
    if g < 0:
        raise InvalidParameterError(f"coefficient limit must be non-negative, got {limit}")
    return extract_coefficients(
        factors_for(users),
        g + 1,
        imag_rel_tol=numerics.imag_rel_tol,
        imag_abs_tol=numerics.imag_abs_tol,
        acceptance_window=numerics.acceptance_window,
    )


def normalizer_B(scenario: Scenario, numerics: Optional[NumericsConfig] = None) -> ScaledComplex:
    """Normalizing constant B of the mixed system."""
    return MixedAnalyzer(scenario, numerics).normalizer


def joint_mass(scenario: Scenario, x: Sequence[int], a: Sequence[Any]) -> float:
    """Steady-state probability of state (x; a)."""
    return MixedAnalyzer(scenario).joint_mass(x, a)


def aggregated_mass(scenario: Scenario, x: int, a: Sequence[Any]) -> float:
    """Probability of x non-persistent transmitters in total and activities a."""
    return MixedAnalyzer(scenario).aggregated_mass(x, a)


def idle_probability(scenario: Scenario, j: int, numerics: Optional[NumericsConfig] = None) -> float:
    """P[I_j] for the 1-based user index j."""
    return MixedAnalyzer(scenario, numerics).idle_probability(j)


def persistent_metrics(
    scenario: Scenario, j: int, numerics: Optional[NumericsConfig] = None
) -> PersistentMetrics:
    """P[I_j], P[W_j], P[T_j], gamma_j and phi_j for the 1-based user index j."""
    return MixedAnalyzer(scenario, numerics).persistent_metrics(j)


def busy_channel_distribution(
    scenario: Scenario, numerics: Optional[NumericsConfig] = None
) -> BusyDistribution:
    """Distribution of the number of busy channels over 0..m."""
    return MixedAnalyzer(scenario, numerics).busy_distribution


def nonpersistent_success(scenario: Scenario, numerics: Optional[NumericsConfig] = None) -> float:
    """phi_0, the success probability seen by Poisson arrivals.

    Raises:
        UndefinedMetricError: If the scenario has no non-persistent classes
    """
    return MixedAnalyzer(scenario, numerics).phi_0


def full_report(scenario: Scenario, numerics: Optional[NumericsConfig] = None) -> ExactReport:
    """Every exact metric of a scenario in one pass."""
    return MixedAnalyzer(scenario, numerics).report()
