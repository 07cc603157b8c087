"""Exception hierarchy for the multi-access toolkit.

Every error raised on purpose by the package derives from
``MultiAccessError`` so that the command-line front end can map it to an
exit code.
"""

from typing import Optional


class MultiAccessError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(MultiAccessError, ValueError):
    """A model parameter is outside its allowed range."""


class ProfileValidationError(InvalidParameterError):
    """A success profile violates one of its three axioms.

    Attributes:
        axiom: ``range`` (0 <= theta <= 1), ``positive`` (theta(b) > 0 for
            b < m) or ``full_blocks`` (theta(m) = 0)
        index: Busy count b at which the check failed
    """

    def __init__(self, axiom: str, index: int, message: str):
        super().__init__(f"{axiom} axiom violated at b={index}: {message}")
        self.axiom = axiom
        self.index = index


class InvalidStateError(MultiAccessError, ValueError):
    """A state vector is not in the legitimate state space."""


class ScenarioSchemaError(MultiAccessError):
    """A scenario or sweep file could not be read or validated.

    Attributes:
        path: File the error refers to, if any
        details: Human readable diagnostics, one entry per problem
    """

    def __init__(self, message: str, path: Optional[str] = None, details: Optional[list] = None):
        super().__init__(message)
        self.path = path
        self.details = details or []

    def __str__(self) -> str:
        """Return the message followed by the individual diagnostics."""
        head = super().__str__()
        if self.path:
            head = f"{self.path}: {head}"
        if not self.details:
            return head
        return head + "\n" + "\n".join(f"  - {d}" for d in self.details)


class ConditioningError(MultiAccessError, ArithmeticError):
    """Scaled arithmetic failed to recover a real coefficient."""


class OracleScopeError(MultiAccessError):
    """An instance is too large for a brute-force oracle.

    Attributes:
        estimate: Size of the instance (states, factors or users)
        limit: Configured limit that was exceeded
    """

    def __init__(self, what: str, estimate: int, limit: int):
        super().__init__(f"{what}: {estimate} exceeds oracle limit {limit}")
        self.estimate = estimate
        self.limit = limit


class OracleSolverError(MultiAccessError):
    """The global balance system could not be solved."""


class UndefinedMetricError(MultiAccessError):
    """A metric is not defined for the given scenario."""


class ComparisonError(MultiAccessError):
    """Exact and simulated reports do not describe the same scenario."""
