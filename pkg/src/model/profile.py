"""Conditional success probability profiles.

A profile holds theta(b), the probability that an access attempt finds an
idle channel when b of the m channels are busy. Any profile used by the
analysis must satisfy three axioms:

    range:       0 <= theta(b) <= 1 for all b in 0..m
    positive:    theta(b) > 0 for all b in 0..m-1
    full_blocks: theta(m) = 0
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import structlog

from src.common.exceptions import InvalidParameterError, ProfileValidationError

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class SuccessProfile:
    """Success probability theta(0..m) indexed by busy count.

    Attributes:
        theta: Tuple of m+1 probabilities
    """

    theta: Tuple[float, ...]

    def __post_init__(self):
        """Validate the axioms after initialization."""
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        _check_axioms(self.theta)

    @property
    def channels(self) -> int:
        """Number of channels m."""
        return len(self.theta) - 1

    def __getitem__(self, b: int) -> float:
        return self.theta[b]

    def __len__(self) -> int:
        return len(self.theta)


def _check_axioms(theta: Sequence[float]) -> None:
    if len(theta) < 2:
        raise InvalidParameterError(f"profile needs m+1 >= 2 entries, got {len(theta)}")
    m = len(theta) - 1
    for b, t in enumerate(theta):
        if not (0.0 <= t <= 1.0):
            raise ProfileValidationError("range", b, f"theta({b})={t} is not in [0, 1]")
    for b in range(m):
        if theta[b] <= 0.0:
            raise ProfileValidationError("positive", b, f"theta({b}) must be positive")
    if theta[m] != 0.0:
        raise ProfileValidationError("full_blocks", m, f"theta(m)={theta[m]} must be 0")


def validate_profile(theta: Sequence[float]) -> SuccessProfile:
    """Validate a raw theta vector.

    Args:
        theta: m+1 reals indexed by busy count

    Returns:
        SuccessProfile: The validated profile

    Raises:
        ProfileValidationError: Naming the failing axiom and index
    """
    return SuccessProfile(tuple(theta))


def scan_success_profile(m: int, s: int) -> SuccessProfile:
    """Success profile of a user scanning s random channels out of m.

    theta(b) = 1 for b < s, otherwise one minus the probability that all s
    scanned channels are busy, computed as a running product of
    (b - r)/(m - r).

    Args:
        m: Channel count
        s: Channels scanned per attempt, 1 <= s <= m

    Returns:
        SuccessProfile: The profile theta(0..m)

    Raises:
        InvalidParameterError: If m <= 0 or s is outside 1..m
    """
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m <= 0:
        raise InvalidParameterError(f"channel count must be a positive integer, got {m!r}")
    if isinstance(s, bool) or not isinstance(s, (int, np.integer)) or not 1 <= s <= m:
        raise InvalidParameterError(f"scan width must be in 1..{m}, got {s!r}")

    busy = np.arange(s, m + 1, dtype=float)
    miss = np.ones_like(busy)
    for r in range(s):
        miss *= (busy - r) / (m - r)
    theta = np.ones(m + 1)
    theta[s:] = 1.0 - miss
    # every scanned channel is busy when b == m
    theta[m] = 0.0
    return SuccessProfile(tuple(theta))


def sample_scan_success(
    m: int,
    s: int,
    b: int,
    trials: int = 100_000,
    seed: Optional[int] = None,
) -> float:
    """Monte-Carlo estimate of theta(b) for random s-subsets.

    Channels 0..b-1 are busy; each trial scans a uniformly random subset of
    s channels and succeeds if any of them is idle.

    Args:
        m: Channel count
        s: Scan width
        b: Busy channel count, 0 <= b <= m
        trials: Number of random subsets
        seed: Seed for the random generator

    Returns:
        float: Fraction of successful trials
    """
    if not 0 <= b <= m:
        raise InvalidParameterError(f"busy count must be in 0..{m}, got {b}")
    scan_success_profile(m, s)
    rng = np.random.default_rng(seed)
    chunk = max(1, 2_000_000 // m)
    hits = 0
    done = 0
    while done < trials:
        rows = min(chunk, trials - done)
        # argsort of uniforms gives a uniformly random permutation per row
        subsets = np.argsort(rng.random((rows, m)), axis=1)[:, :s]
        hits += int((subsets >= b).any(axis=1).sum())
        done += rows
    logger.debug("scan_success_sampled", m=m, s=s, b=b, trials=trials)
    return hits / trials
