"""Scenario models.

A scenario describes the full system: the channel count, how attempts
succeed (scan width or an explicit theta table), the Poisson classes of
non-persistent users and the individual persistent users.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import structlog
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    model_validator,
)

from src.common.exceptions import ScenarioSchemaError
from .profile import SuccessProfile, scan_success_profile, validate_profile

logger = structlog.get_logger(__name__)


class NonPersistentClass(BaseModel):
    """Poisson class of users that attempt access once."""
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    lam: float = Field(..., gt=0, alias="lambda", description="Arrival rate")
    mu: float = Field(..., gt=0, description="File service rate")

    @property
    def rho(self) -> float:
        """Offered load lambda/mu of this class."""
        return self.lam / self.mu


class PersistentUser(BaseModel):
    """User cycling through Idle, Waiting and Transmitting."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(..., gt=0, description="Idle to Waiting rate")
    beta: float = Field(..., gt=0, description="Waiting to Idle rate")
    u: float = Field(..., gt=0, description="Attempt rate while Waiting")
    v: float = Field(..., gt=0, description="Transmission completion rate")

    @property
    def wait_ratio(self) -> float:
        """alpha/beta, the Waiting weight relative to Idle."""
        return self.alpha / self.beta

    @property
    def transmit_ratio(self) -> float:
        """alpha*u/(beta*v), the Transmitting weight relative to Idle."""
        return self.alpha * self.u / (self.beta * self.v)

    def key(self) -> Tuple[float, float, float, float]:
        """Parameter tuple, equal for exchangeable users."""
        return (self.alpha, self.beta, self.u, self.v)


class Scenario(BaseModel):
    """Complete system description."""
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    channels: int = Field(..., gt=0, description="Channel count m")
    scan: Optional[int] = Field(None, description="Channels scanned per attempt")
    theta: Optional[Tuple[float, ...]] = Field(None, description="Explicit success profile")
    classes: Tuple[NonPersistentClass, ...] = Field(default=(), alias="non_persistent_classes")
    users: Tuple[PersistentUser, ...] = Field(default=(), alias="persistent_users")

    _profile: Optional[SuccessProfile] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def validate_scenario(self) -> "Scenario":
        """Check scan/theta exclusivity, population and profile axioms."""
        if (self.scan is None) == (self.theta is None):
            raise ValueError("exactly one of 'scan' and 'theta' must be given")
        if not self.classes and not self.users:
            raise ValueError("a scenario needs at least one non-persistent class or persistent user")
        if self.scan is not None:
            profile = scan_success_profile(self.channels, self.scan)
        else:
            if len(self.theta) != self.channels + 1:
                raise ValueError(
                    f"theta must have channels+1={self.channels + 1} entries, got {len(self.theta)}"
                )
            profile = validate_profile(self.theta)
        self._profile = profile
        return self

    @classmethod
    def build(
        cls,
        channels: int,
        scan: Optional[int] = None,
        theta: Optional[Sequence[float]] = None,
        classes: Iterable[Tuple[float, float]] = (),
        users: Iterable[Tuple[float, float, float, float]] = (),
    ) -> "Scenario":
        """Build a scenario from plain tuples.

        Args:
            channels: Channel count m
            scan: Scan width s (exclusive with theta)
            theta: Explicit profile (exclusive with scan)
            classes: (lambda, mu) pairs
            users: (alpha, beta, u, v) tuples

        Returns:
            Scenario: The validated scenario
        """
        return cls(
            channels=channels,
            scan=scan,
            theta=tuple(theta) if theta is not None else None,
            classes=tuple(NonPersistentClass(lam=lam, mu=mu) for lam, mu in classes),
            users=tuple(PersistentUser(alpha=a, beta=b, u=u, v=v) for a, b, u, v in users),
        )

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "Scenario":
        """Validate a mapping in the scenario file schema."""
        return scenario_from_dict(data)

    @property
    def profile(self) -> SuccessProfile:
        """The success profile theta(0..m)."""
        return self._profile

    @property
    def k(self) -> int:
        """Number of non-persistent classes."""
        return len(self.classes)

    @property
    def n(self) -> int:
        """Number of persistent users."""
        return len(self.users)

    @property
    def rho(self) -> float:
        """Total loading sum(lambda_i/mu_i)."""
        return loading(self)

    def replace(self, **changes: Any) -> "Scenario":
        """Return a validated copy with some fields replaced."""
        data = self.to_json_dict()
        data.update(changes)
        return Scenario.model_validate(data)

    def to_json_dict(self) -> Dict[str, Any]:
        """Plain dict in the scenario file schema."""
        return {
            "channels": self.channels,
            "scan": self.scan,
            "theta": list(self.theta) if self.theta is not None else None,
            "non_persistent_classes": [{"lambda": c.lam, "mu": c.mu} for c in self.classes],
            "persistent_users": [u.model_dump() for u in self.users],
        }

    def fingerprint(self) -> str:
        """Stable hash identifying the scenario."""
        canonical = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def loading(scenario: Scenario) -> float:
    """Total loading rho = sum of lambda_i/mu_i (0 without classes)."""
    return sum(c.lam / c.mu for c in scenario.classes)


def _format_validation_error(error: ValidationError) -> list:
    details = []
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ())) or "<root>"
        details.append(f"{location}: {item.get('msg')}")
    return details


def scenario_from_dict(data: Dict[str, Any], source: Optional[str] = None) -> Scenario:
    """Validate a scenario mapping.

    Args:
        data: Mapping in the scenario file schema
        source: File name used in diagnostics

    Returns:
        Scenario: The validated scenario

    Raises:
        ScenarioSchemaError: With one diagnostic per failing field
    """
    if not isinstance(data, dict):
        raise ScenarioSchemaError("scenario must be a JSON object", path=source)
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise ScenarioSchemaError(
            "scenario validation failed", path=source, details=_format_validation_error(e)
        )


def read_json_file(path: Union[str, Path]) -> Any:
    """Read a JSON file, reporting decode errors with line and column."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioSchemaError(f"cannot read file: {e.strerror}", path=str(path))
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioSchemaError(
            "invalid JSON", path=str(path), details=[f"line {e.lineno}, column {e.colno}: {e.msg}"]
        )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Load and validate a scenario file.

    Args:
        path: JSON scenario file

    Returns:
        Scenario: The validated scenario
    """
    scenario = scenario_from_dict(read_json_file(path), source=str(path))
    logger.debug("scenario_loaded", path=str(path), channels=scenario.channels,
                 classes=scenario.k, users=scenario.n)
    return scenario
