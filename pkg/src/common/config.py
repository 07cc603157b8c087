"""Configuration models and loader.

This module contains the pydantic models that validate ``config/config.yaml``
and the loader that reads the file, interpolates environment variables and
falls back to defaults when no file is present.
"""

import os
import re
from pathlib import Path
from typing import Any, Dict, Optional, Union

import structlog
import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from .exceptions import ScenarioSchemaError

logger = structlog.get_logger(__name__)

DEFAULT_CONFIG_PATH = "config/config.yaml"
CONFIG_ENV_VAR = "MULTIACCESS_CONFIG"
ENV_REFERENCE = re.compile(r"\$\{([^}]+)\}")


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "INFO"
    format: str = "structured"

    @field_validator("level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate logging level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Invalid log level. Must be one of: {', '.join(valid_levels)}")
        return v.upper()

    @field_validator("format")
    @classmethod
    def validate_format(cls, v: str) -> str:
        """Validate logging format."""
        valid_formats = ["structured", "text", "json"]
        if v.lower() not in valid_formats:
            raise ValueError(f"Invalid format. Must be one of: {', '.join(valid_formats)}")
        return v.lower()


class NumericsConfig(BaseModel):
    """Coefficient extraction tolerances."""
    imag_rel_tol: float = Field(default=1e-9, gt=0)
    imag_abs_tol: float = Field(default=1e-12, gt=0)
    acceptance_window: float = Field(default=1e-3, gt=0, le=1)
    convolution_limit: int = Field(default=64, ge=0)


class OracleConfig(BaseModel):
    """Brute-force oracle limits."""
    state_limit: int = Field(default=200_000, gt=0)
    enumeration_limit: int = Field(default=14, ge=0)
    balance_tolerance: float = Field(default=1e-10, gt=0)
    coefficient_tolerance: float = Field(default=1e-9, gt=0)
    dense_memory_limit_mb: int = Field(default=4096, gt=0)


class SimulationSettings(BaseModel):
    """Default simulation parameters."""
    transitions: int = Field(default=10_000_000, gt=0)
    seed: int = Field(default=1, ge=0, lt=2**64)
    batches: int = Field(default=10, gt=0)
    block_size: int = Field(default=65_536, gt=0)


class SweepSettings(BaseModel):
    """Sweep execution settings."""
    max_concurrency: int = Field(default=4, gt=0)


class AppConfig(BaseModel):
    """Main application configuration."""
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)


def interpolate_env_vars(config: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively interpolate environment variables in configuration.

    Args:
        config: Raw configuration mapping

    Returns:
        Configuration with ``${VAR}`` / ``${VAR:-default}`` values replaced
    """
    result: Dict[str, Any] = {}
    for key, value in config.items():
        if isinstance(value, dict):
            result[key] = interpolate_env_vars(value)
        elif isinstance(value, list):
            result[key] = [
                interpolate_env_vars(item) if isinstance(item, dict) else interpolate_env_var(item)
                for item in value
            ]
        else:
            result[key] = interpolate_env_var(value)
    return result


def _env_value(match: "re.Match[str]") -> str:
    env_var = match.group(1)
    if ":-" in env_var:
        env_name, default = env_var.split(":-", 1)
        return os.getenv(env_name, default)
    env_value = os.getenv(env_var)
    if env_value is None:
        raise ValueError(f"Environment variable {env_var} not set")
    return env_value


def interpolate_env_var(value: Any) -> Any:
    """Interpolate environment variable references in a single value.

    Every ``${VAR}`` / ``${VAR:-default}`` is substituted in place, so the
    text around a reference is kept. A value that is exactly one reference
    has numeric and boolean results converted.

    Args:
        value: Value potentially containing environment variable references

    Returns:
        Interpolated value
    """
    if not isinstance(value, str) or not ENV_REFERENCE.search(value):
        return value

    env_value = ENV_REFERENCE.sub(_env_value, value)
    if not ENV_REFERENCE.fullmatch(value):
        return env_value

    if env_value.isdigit():
        return int(env_value)
    if env_value.replace(".", "", 1).isdigit():
        return float(env_value)
    if env_value.lower() in ("true", "false"):
        return env_value.lower() == "true"
    return env_value


def load_config(path: Optional[Union[str, Path]] = None) -> AppConfig:
    """Load and validate configuration.

    The path is taken from the argument, then ``MULTIACCESS_CONFIG``, then
    ``config/config.yaml``. A missing default file yields the built-in
    defaults; a missing explicitly requested file is an error.

    Args:
        path: Optional explicit config file

    Returns:
        AppConfig: Validated configuration

    Raises:
        ScenarioSchemaError: If the file is unreadable or fails validation
    """
    load_dotenv()

    explicit = path is not None or CONFIG_ENV_VAR in os.environ
    config_path = Path(path or os.getenv(CONFIG_ENV_VAR, DEFAULT_CONFIG_PATH))
    if not config_path.exists():
        if explicit:
            raise ScenarioSchemaError("configuration file not found", path=str(config_path))
        logger.debug("config_defaults_used", path=str(config_path))
        return AppConfig()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            raw_config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        logger.error("invalid_config_file", path=str(config_path), error=str(e))
        raise ScenarioSchemaError("invalid configuration file", path=str(config_path), details=[str(e)])

    try:
        config = AppConfig(**interpolate_env_vars(raw_config))
    except (ValidationError, ValueError) as e:
        logger.error("config_validation_failed", path=str(config_path), error=str(e))
        raise ScenarioSchemaError("configuration validation failed", path=str(config_path), details=[str(e)])

    logger.debug("config_loaded", path=str(config_path))
    return config
