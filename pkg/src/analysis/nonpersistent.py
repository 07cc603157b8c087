"""Exact steady state of the all non-persistent system.

With only Poisson classes the chain is reversible and the busy-channel
distribution depends on the classes only through the total loading rho.
All sums over the busy count b use the term recurrence

    term(b+1) = term(b) * theta(b) * rho / (b+1)

in scaled arithmetic so that rho^b and b! are never formed on their own.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import structlog

from src.common.exceptions import InvalidParameterError, InvalidStateError
from src.model.profile import SuccessProfile
from src.model.scenario import NonPersistentClass
from src.numeric.scaled import ScaledComplex, ScaledVector

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class BusyDistribution:
    """Steady-state distribution of the number of busy channels.

    Attributes:
        probabilities: P[b busy] for b = 0..m
        normalizer: The constant A (or B for the mixed system)
    """

    probabilities: Tuple[float, ...]
    normalizer: ScaledComplex

    def __post_init__(self):
        """Validate the distribution after initialization."""
        object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
        if any(p < 0 for p in self.probabilities):
            raise InvalidParameterError("busy distribution has a negative entry")
        total = math.fsum(self.probabilities)
        if abs(total - 1.0) > 1e-10:
            raise InvalidParameterError(f"busy distribution sums to {total}, not 1")

    @property
    def channels(self) -> int:
        return len(self.probabilities) - 1

    @property
    def mean(self) -> float:
        """Mean number of busy channels."""
        return math.fsum(b * p for b, p in enumerate(self.probabilities))

    def __getitem__(self, b: int) -> float:
        return self.probabilities[b]

    def __len__(self) -> int:
        return len(self.probabilities)


@dataclass(frozen=True)
class ClassThroughput:
    """Accepted and dropped arrival rates of one non-persistent class."""

    arrival_rate: float
    accepted: float
    dropped: float


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not (math.isfinite(rho) and rho >= 0):
        raise InvalidParameterError(f"loading must be a non-negative real, got {rho}")
    return rho


def success_products(profile: SuccessProfile) -> ScaledVector:
    """T(y) = prod_{r<y} theta(r) for y = 0..m+1 (T(m+1) = 0)."""
    return ScaledVector.cumulative_product(profile.theta)


def poisson_weights(rho: float, size: int) -> ScaledVector:
    """rho^x / x! for x = 0..size-1."""
    return ScaledVector.cumulative_product([rho / (x + 1) for x in range(size - 1)])


def load_terms(profile: SuccessProfile, rho: float) -> ScaledVector:
    """Unnormalized busy weights T(b) rho^b / b! for b = 0..m."""
    rho = _check_rho(rho)
    m = profile.channels
    return ScaledVector.cumulative_product(
        [profile[b] * rho / (b + 1) for b in range(m)]
    )


def normalizer_A(profile: SuccessProfile, rho: float) -> ScaledComplex:
    """Normalizing constant A = p(0, ..., 0).

    Args:
        profile: Success profile theta(0..m)
        rho: Total loading

    Returns:
        ScaledComplex: Positive real A, kept scaled for extreme loads
    """
    return ScaledComplex.one() / load_terms(profile, rho).total()


def busy_distribution(profile: SuccessProfile, rho: float) -> BusyDistribution:
    """Distribution of the number of busy channels.

    Args:
        profile: Success profile theta(0..m)
        rho: Total loading

    Returns:
        BusyDistribution: P[b busy] for b = 0..m with normalizer A
    """
    terms = load_terms(profile, rho)
    total = terms.total()
    probabilities = terms.relative_to(total).real
    logger.debug("busy_distribution_computed", channels=profile.channels, rho=rho)
    return BusyDistribution(tuple(probabilities.tolist()), ScaledComplex.one() / total)


def success_probability(profile: SuccessProfile, rho: float) -> float:
    """Long-term success probability of a non-persistent arrival.

    phi = A * sum_b T(b+1) rho^b / b!, i.e. the busy distribution averaged
    against theta.

    Args:
        profile: Success profile theta(0..m)
        rho: Total loading

    Returns:
        float: phi in (0, 1]
    """
    terms = load_terms(profile, rho)
    accepted = (terms * ScaledVector(list(profile.theta))).total()
    return float((accepted / terms.total()).to_float())


def state_mass(
    profile: SuccessProfile,
    classes: Sequence[NonPersistentClass],
    x: Sequence[int],
) -> float:
    """Steady-state probability of the occupancy vector x.

    Args:
        profile: Success profile theta(0..m)
        classes: The k non-persistent classes
        x: Number of transmitting users per class

    Returns:
        float: A * T(sum x) * prod_i rho_i^x_i / x_i!

    Raises:
        InvalidStateError: If x has the wrong length, a negative entry or
            more users than channels
    """
    x = _check_occupancy(x, len(classes), profile.channels)
    rho = sum(c.rho for c in classes)
    weight = success_products(profile)[sum(x)]
    for count, cls in zip(x, classes):
        weight = weight * poisson_weights(cls.rho, count + 1)[count]
    return float(weight * normalizer_A(profile, rho))


def _check_occupancy(x: Sequence[int], k: int, m: int) -> List[int]:
    if len(x) != k:
        raise InvalidStateError(f"occupancy vector needs {k} entries, got {len(x)}")
    counts = []
    for value in x:
        if isinstance(value, bool) or int(value) != value or value < 0:
            raise InvalidStateError(f"occupancy entries must be non-negative integers, got {value!r}")
        counts.append(int(value))
    if sum(counts) > m:
        raise InvalidStateError(f"{sum(counts)} transmitting users exceed {m} channels")
    return counts


def erlang_b(m: int, rho: float) -> float:
    """Erlang loss probability of an M/M/m/m system (standard recursion)."""
    if m < 0:
        raise InvalidParameterError(f"channel count must be non-negative, got {m}")
    rho = _check_rho(rho)
    blocking = 1.0
    for servers in range(1, m + 1):
        blocking = rho * blocking / (servers + rho * blocking)
    return blocking


def class_throughput(classes: Sequence[NonPersistentClass], phi: float) -> Tuple[ClassThroughput, ...]:
    """Accepted (lambda_i phi) and dropped (lambda_i (1-phi)) rates per class."""
    return tuple(ClassThroughput(c.lam, c.lam * phi, c.lam * (1.0 - phi)) for c in classes)
