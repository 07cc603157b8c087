"""Discrete-event simulation of the embedded jump chain.

Only events are simulated. Each step credits the mean holding time
1/R(w) of the current state w, where R(w) sums every event rate including
access attempts, then draws one event with probability proportional to its
rate. A failed attempt leaves the state unchanged but still counts as a
transition and is still credited time.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import structlog

from src.common.exceptions import InvalidParameterError
from src.model.scenario import Scenario

logger = structlog.get_logger(__name__)

IDLE, WAITING, TRANSMITTING = 0, 1, 2


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one simulation run.

    Attributes:
        scenario: System to simulate
        transitions: Number of events, failed attempts included
        seed: 64-bit seed of the Philox generator
        batches: Number of equal batches for batch-means standard errors
        block_size: Uniforms drawn per generator call
    """

    scenario: Scenario
    transitions: int = 10_000_000
    seed: int = 1
    batches: int = 10
    block_size: int = 65_536

    def __post_init__(self):
        """Validate run parameters."""
        if isinstance(self.transitions, bool) or not isinstance(self.transitions, int) or self.transitions < 1:
            raise InvalidParameterError(f"transitions must be a positive integer, got {self.transitions!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.batches < 1:
            raise InvalidParameterError(f"batch count must be positive, got {self.batches}")
        if self.block_size < 2:
            raise InvalidParameterError(f"block size must be at least 2, got {self.block_size}")


@dataclass(frozen=True)
class UserEstimate:
    """Simulated metrics of one persistent user."""

    p_idle: float
    p_wait: float
    p_transmit: float
    attempts: int
    successes: int
    success_ratio: Optional[float]
    success_ratio_stderr: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_idle": self.p_idle,
            "p_wait": self.p_wait,
            "p_transmit": self.p_transmit,
            "attempts": self.attempts,
            "successes": self.successes,
            "success_ratio": self.success_ratio,
            "success_ratio_stderr": self.success_ratio_stderr,
        }


@dataclass(frozen=True)
class SimulationReport:
    """Estimates from one run.

    Attributes:
        scenario_fingerprint: Fingerprint of the simulated scenario
        seed: Seed of the run
        transitions: Events simulated
        total_time: Sum of credited mean holding times
        users: Per persistent user estimates
        class_attempts: Attempts per non-persistent class
        class_successes: Successes per non-persistent class
        phi_0: Pooled non-persistent success ratio (None without attempts)
        phi_0_stderr: Batch-means standard error of phi_0
        busy_histogram: Time fraction with y busy channels, y = 0..m
    """

    scenario_fingerprint: str
    seed: int
    transitions: int
    total_time: float
    users: Tuple[UserEstimate, ...]
    class_attempts: Tuple[int, ...]
    class_successes: Tuple[int, ...]
    phi_0: Optional[float]
    phi_0_stderr: Optional[float]
    busy_histogram: Tuple[float, ...] = field(repr=False)

    @property
    def attempts(self) -> int:
        return sum(self.class_attempts)

    @property
    def successes(self) -> int:
        return sum(self.class_successes)

    def class_ratios(self) -> Tuple[Optional[float], ...]:
        """Per-class success ratios; equal to phi_0 in the limit."""
        return tuple(
            s / a if a else None for a, s in zip(self.class_attempts, self.class_successes)
        )

    def metric_values(self) -> Dict[str, float]:
        """Probability metrics keyed the same way as an exact report."""
        values: Dict[str, float] = {}
        if self.class_attempts and self.phi_0 is not None:
            values["phi_0"] = self.phi_0
        for j, user in enumerate(self.users, start=1):
            values[f"user{j}.p_idle"] = user.p_idle
            values[f"user{j}.p_wait"] = user.p_wait
            values[f"user{j}.p_transmit"] = user.p_transmit
            if user.success_ratio is not None:
                values[f"user{j}.phi"] = user.success_ratio
        for y, p in enumerate(self.busy_histogram):
            values[f"busy[{y}]"] = p
        return values

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready rendering."""
        return {
            "scenario_fingerprint": self.scenario_fingerprint,
            "seed": self.seed,
            "transitions": self.transitions,
            "total_time": self.total_time,
            "phi_0": self.phi_0,
            "phi_0_stderr": self.phi_0_stderr,
            "class_attempts": list(self.class_attempts),
            "class_successes": list(self.class_successes),
            "busy_histogram": list(self.busy_histogram),
            "users": [u.to_dict() for u in self.users],
        }


class _UniformStream:
    """Block-wise uniforms from a Philox generator."""

    def __init__(self, seed: int, block_size: int):
        self._rng = np.random.Generator(np.random.Philox(seed))
        self._block_size = block_size
        self._block: List[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._block):
            self._block = self._rng.random(self._block_size).tolist()
            self._pos = 0
        value = self._block[self._pos]
        self._pos += 1
        return value


def _batch_stderr(attempts: List[int], successes: List[int]) -> Optional[float]:
    ratios = [s / a for a, s in zip(attempts, successes) if a > 0]
    if len(ratios) < 2:
        return None
    return float(np.std(ratios, ddof=1) / math.sqrt(len(ratios)))


def run(config: SimulationConfig) -> SimulationReport:
    """Simulate the scenario for ``config.transitions`` events.

    The run starts from the empty system with every persistent user Idle.
    Identical (seed, scenario, transitions) give identical reports.

    Args:
        config: Run parameters

    Returns:
        SimulationReport: Time fractions, attempt counters and ratios
    """
    scenario = config.scenario
    theta = list(scenario.profile.theta)
    m = scenario.channels
    lam = [c.lam for c in scenario.classes]
    mu = [c.mu for c in scenario.classes]
    alpha = [u.alpha for u in scenario.users]
    beta = [u.beta for u in scenario.users]
    attempt = [u.u for u in scenario.users]
    finish = [u.v for u in scenario.users]
    k, n = len(lam), len(alpha)
    arrival_total = sum(lam)

    x = [0] * k
    a = [IDLE] * n
    busy = 0
    user_rate = list(alpha)
    user_total = sum(user_rate)
    departure_total = 0.0

    clock = 0.0
    user_since = [0.0] * n
    user_time = [[0.0, 0.0, 0.0] for _ in range(n)]
    busy_since = 0.0
    busy_time = [0.0] * (m + 1)

    class_attempts = [0] * k
    class_successes = [0] * k
    user_attempts = [0] * n
    user_successes = [0] * n

    batches = min(config.batches, config.transitions)
    boundaries = [config.transitions * (b + 1) // batches for b in range(batches)]
    batch_np = ([], [])
    batch_user = [([], []) for _ in range(n)]
    mark_np = (0, 0)
    mark_user = [(0, 0)] * n

    uniforms = _UniformStream(config.seed, config.block_size)
    next_boundary = 0

    for step in range(1, config.transitions + 1):
        total = arrival_total + departure_total + user_total
        clock += 1.0 / total
        pick = uniforms.next() * total

        if pick < arrival_total or (n == 0 and departure_total == 0):
            i = 0
            while i < k - 1 and pick >= lam[i]:
                pick -= lam[i]
                i += 1
            class_attempts[i] += 1
            if uniforms.next() < theta[busy]:
                class_successes[i] += 1
                x[i] += 1
                departure_total = sum(x[c] * mu[c] for c in range(k))
                busy_time[busy] += clock - busy_since
                busy_since = clock
                busy += 1
        elif pick < arrival_total + departure_total or n == 0:
            pick -= arrival_total
            i = 0
            while i < k - 1 and pick >= x[i] * mu[i]:
                pick -= x[i] * mu[i]
                i += 1
            while x[i] == 0:
                i -= 1
            x[i] -= 1
            departure_total = sum(x[c] * mu[c] for c in range(k))
            busy_time[busy] += clock - busy_since
            busy_since = clock
            busy -= 1
        else:
            pick -= arrival_total + departure_total
            j = 0
            while j < n - 1 and pick >= user_rate[j]:
                pick -= user_rate[j]
                j += 1
            state = a[j]
            target = state
            if state == IDLE:
                target = WAITING
            elif state == WAITING:
                if pick < beta[j]:
                    target = IDLE
                else:
                    user_attempts[j] += 1
                    if uniforms.next() < theta[busy]:
                        user_successes[j] += 1
                        target = TRANSMITTING
                        busy_time[busy] += clock - busy_since
                        busy_since = clock
                        busy += 1
            else:
                target = WAITING
                busy_time[busy] += clock - busy_since
                busy_since = clock
                busy -= 1
            if target != state:
                user_time[j][state] += clock - user_since[j]
                user_since[j] = clock
                a[j] = target
                user_rate[j] = alpha[j] if target == IDLE else (
                    beta[j] + attempt[j] if target == WAITING else finish[j]
                )
                user_total = sum(user_rate)

        if step == boundaries[next_boundary]:
            tried, won = sum(class_attempts), sum(class_successes)
            batch_np[0].append(tried - mark_np[0])
            batch_np[1].append(won - mark_np[1])
            mark_np = (tried, won)
            for j in range(n):
                batch_user[j][0].append(user_attempts[j] - mark_user[j][0])
                batch_user[j][1].append(user_successes[j] - mark_user[j][1])
                mark_user[j] = (user_attempts[j], user_successes[j])
            next_boundary += 1

    # close the open holding segments
    busy_time[busy] += clock - busy_since
    for j in range(n):
        user_time[j][a[j]] += clock - user_since[j]

    users = []
    for j in range(n):
        spent = math.fsum(user_time[j])
        tried, won = user_attempts[j], user_successes[j]
        users.append(
            UserEstimate(
                p_idle=user_time[j][IDLE] / spent,
                p_wait=user_time[j][WAITING] / spent,
                p_transmit=user_time[j][TRANSMITTING] / spent,
                attempts=tried,
                successes=won,
                success_ratio=won / tried if tried else None,
                success_ratio_stderr=_batch_stderr(*batch_user[j]),
            )
        )

    busy_total = math.fsum(busy_time)
    tried, won = sum(class_attempts), sum(class_successes)
    report = SimulationReport(
        scenario_fingerprint=scenario.fingerprint(),
        seed=config.seed,
        transitions=config.transitions,
        total_time=clock,
        users=tuple(users),
        class_attempts=tuple(class_attempts),
        class_successes=tuple(class_successes),
        phi_0=won / tried if tried else None,
        phi_0_stderr=_batch_stderr(*batch_np),
        busy_histogram=tuple(t / busy_total for t in busy_time),
    )
    logger.info(
        "simulation_finished",
        transitions=config.transitions,
        seed=config.seed,
        total_time=clock,
        phi_0=report.phi_0,
    )
    return report
