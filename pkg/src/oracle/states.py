"""Explicit enumeration of the legitimate state space.

A state w = (x; a) holds the number of transmitting users of every
non-persistent class and the activity of every persistent user. It is
legitimate when sum(x) + #{a_j = T} <= m.
"""

import itertools
from dataclasses import dataclass
from math import comb
from typing import Dict, Iterator, List, Sequence, Tuple

import structlog

from src.common.exceptions import OracleScopeError
from src.common.types import ActivityState
from src.model.scenario import Scenario

logger = structlog.get_logger(__name__)

STATE_LIMIT = 200_000


@dataclass(frozen=True)
class StateIndex:
    """One enumerated state and its dense index."""

    index: int
    x: Tuple[int, ...]
    a: Tuple[ActivityState, ...]

    @property
    def transmitters(self) -> int:
        """Number of transmitting persistent users."""
        return sum(1 for state in self.a if state is ActivityState.TRANSMITTING)

    @property
    def busy(self) -> int:
        """Busy channels sum(x) + #{a_j = T}."""
        return sum(self.x) + self.transmitters

    @property
    def key(self) -> Tuple[Tuple[int, ...], Tuple[ActivityState, ...]]:
        return (self.x, self.a)

    def label(self) -> str:
        """Compact label such as ``(1,0;W,T)``."""
        return f"({','.join(map(str, self.x))};{','.join(s.code for s in self.a)})"


class StateSpace:
    """Ordered, duplicate-free list of states with reverse lookup."""

    def __init__(self, scenario: Scenario, states: List[StateIndex]):
        self.scenario = scenario
        self._states = states
        self._lookup: Dict[tuple, int] = {s.key: s.index for s in states}

    def __len__(self) -> int:
        return len(self._states)

    def __getitem__(self, index: int) -> StateIndex:
        return self._states[index]

    def __iter__(self) -> Iterator[StateIndex]:
        return iter(self._states)

    def index_of(self, x: Sequence[int], a: Sequence[ActivityState]) -> int:
        """Dense index of (x; a); KeyError if it is not legitimate."""
        return self._lookup[(tuple(x), tuple(a))]

    def contains(self, x: Sequence[int], a: Sequence[ActivityState]) -> bool:
        return (tuple(x), tuple(a)) in self._lookup


def _occupancy_count(k: int, capacity: int) -> int:
    # vectors of k non-negative integers with sum <= capacity
    if capacity < 0:
        return 0
    return comb(capacity + k, k)


def estimate_state_count(scenario: Scenario) -> int:
    """Exact number of legitimate states, computed without enumerating.

    Sums over the number t of transmitting persistent users: C(n, t) ways
    to choose them, 2^(n-t) idle/waiting patterns for the rest and
    C(m-t+k, k) occupancy vectors for the remaining capacity.
    """
    m, k, n = scenario.channels, scenario.k, scenario.n
    return sum(
        comb(n, t) * 2 ** (n - t) * _occupancy_count(k, m - t)
        for t in range(min(n, m) + 1)
    )


def enumerate_states(scenario: Scenario, limit: int = STATE_LIMIT) -> StateSpace:
    """Enumerate all legitimate states in lexicographic (x, a) order.

    Args:
        scenario: The scenario
        limit: Maximum number of states

    Returns:
        StateSpace: States indexed 0..N-1, I < W < T within a

    Raises:
        OracleScopeError: If the exact state count exceeds ``limit``
    """
    estimate = estimate_state_count(scenario)
    if estimate > limit:
        logger.warning("oracle_refused", states=estimate, limit=limit)
        raise OracleScopeError("state count", estimate, limit)

    m = scenario.channels
    states: List[StateIndex] = []
    activity_order = (ActivityState.IDLE, ActivityState.WAITING, ActivityState.TRANSMITTING)
    activities = list(itertools.product(activity_order, repeat=scenario.n))
    for x in itertools.product(range(m + 1), repeat=scenario.k):
        used = sum(x)
        if used > m:
            continue
        for a in activities:
            if used + sum(1 for s in a if s is ActivityState.TRANSMITTING) <= m:
                states.append(StateIndex(len(states), tuple(x), tuple(a)))

    logger.debug("states_enumerated", states=len(states), channels=m, classes=scenario.k, users=scenario.n)
    return StateSpace(scenario, states)
