"""Direct enumeration of the persistent-user coefficients c_b."""

from typing import Sequence

import numpy as np

from src.common.exceptions import InvalidParameterError, OracleScopeError
from src.model.scenario import PersistentUser

ENUMERATION_LIMIT = 14


def enumerate_all_c(users: Sequence[PersistentUser], limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """c_0..c_n by summing over all 3^n activity vectors.

    Each user contributes weight 1 when Idle, alpha/beta when Waiting and
    alpha*u/(beta*v) when Transmitting; c_b collects the products of the
    vectors with exactly b transmitters.

    Raises:
        OracleScopeError: If there are more than ``limit`` users
    """
    n = len(users)
    if n > limit:
        raise OracleScopeError("enumeration user count", n, limit)
    weights = np.ones(1)
    transmitters = np.zeros(1, dtype=np.int64)
    for user in users:
        weights = np.concatenate([weights, weights * user.wait_ratio, weights * user.transmit_ratio])
        transmitters = np.concatenate([transmitters, transmitters, transmitters + 1])
    return np.bincount(transmitters, weights=weights, minlength=n + 1)


def enumerate_c(users: Sequence[PersistentUser], b: int, limit: int = ENUMERATION_LIMIT) -> float:
    """c_b by direct enumeration; 0 when b > n."""
    if b < 0:
        raise InvalidParameterError(f"transmitter count must be non-negative, got {b}")
    if b > len(users):
        return 0.0
    return float(enumerate_all_c(users, limit=limit)[b])
