"""Tests for configuration loading and logging setup."""

from pathlib import Path

import pytest
import structlog

from src.common.config import AppConfig, interpolate_env_var, load_config
from src.common.exceptions import ScenarioSchemaError
from src.common.log_setup import configure_logging

CONFIG_PATH = Path(__file__).parent.parent / "config" / "config.yaml"


def test_bundled_config_loads(monkeypatch):
    monkeypatch.delenv("MULTIACCESS_LOG_LEVEL", raising=False)
    config = load_config(CONFIG_PATH)
    assert config.logging.level == "INFO"
    assert config.numerics.acceptance_window == pytest.approx(1e-3)
    assert config.oracle.state_limit == 200_000
    assert config.simulation.transitions == 10_000_000


def test_env_var_overrides_log_level(monkeypatch):
    monkeypatch.setenv("MULTIACCESS_LOG_LEVEL", "debug")
    assert load_config(CONFIG_PATH).logging.level == "DEBUG"


def test_config_path_from_environment(monkeypatch, tmp_path: Path):
    path = tmp_path / "custom.yaml"
    path.write_text("simulation:\n  seed: 99\n", encoding="utf-8")
    monkeypatch.setenv("MULTIACCESS_CONFIG", str(path))
    config = load_config()
    assert config.simulation.seed == 99
    assert config.simulation.batches == 10


def test_defaults_without_file(monkeypatch, tmp_path: Path):
    """Test that a missing default file falls back to built-in values."""
    monkeypatch.delenv("MULTIACCESS_CONFIG", raising=False)
    monkeypatch.chdir(tmp_path)
    assert load_config() == AppConfig()


def test_missing_explicit_file(tmp_path: Path):
    with pytest.raises(ScenarioSchemaError):
        load_config(tmp_path / "absent.yaml")


@pytest.mark.parametrize(
    "content",
    [
        "logging:\n  level: LOUD\n",
        "numerics:\n  acceptance_window: 2.0\n",
        "simulation:\n  transitions: 0\n",
        "oracle: [unclosed\n",
    ],
)
def test_invalid_config_rejected(tmp_path: Path, content: str):
    path = tmp_path / "bad.yaml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ScenarioSchemaError):
        load_config(path)


def test_interpolation_types(monkeypatch):
    monkeypatch.setenv("MA_INT", "12")
    monkeypatch.setenv("MA_FLOAT", "0.5")
    monkeypatch.setenv("MA_FLAG", "TRUE")
    assert interpolate_env_var("${MA_INT}") == 12
    assert interpolate_env_var("${MA_FLOAT}") == 0.5
    assert interpolate_env_var("${MA_FLAG}") is True
    assert interpolate_env_var("${MA_UNSET_VALUE:-fallback}") == "fallback"
    assert interpolate_env_var(3) == 3


def test_interpolation_keeps_surrounding_text(monkeypatch):
    """Test in-place substitution of references inside longer strings."""
    monkeypatch.setenv("MA_DIR", "runs")
    monkeypatch.setenv("MA_SEED", "7")
    assert interpolate_env_var("results/${MA_DIR}/fig3.csv") == "results/runs/fig3.csv"
    assert interpolate_env_var("seed-${MA_SEED}") == "seed-7"
    assert interpolate_env_var("${MA_DIR}-${MA_SEED}") == "runs-7"
    assert interpolate_env_var("${MA_UNSET_VALUE:-out}.csv") == "out.csv"


def test_oracle_settings_from_file(tmp_path: Path):
    path = tmp_path / "oracle.yaml"
    path.write_text(
        "oracle:\n  enumeration_limit: 3\n  dense_memory_limit_mb: 16\n"
        "numerics:\n  convolution_limit: 5\n",
        encoding="utf-8",
    )
    config = load_config(path)
    assert config.oracle.enumeration_limit == 3
    assert config.oracle.dense_memory_limit_mb == 16
    assert config.numerics.convolution_limit == 5
    assert not hasattr(config, "environment")


def test_unset_variable_without_default(monkeypatch):
    monkeypatch.delenv("MA_MISSING", raising=False)
    with pytest.raises(ValueError):
        interpolate_env_var("${MA_MISSING}")


def test_logging_goes_to_stderr(capsys):
    """Test JSON log lines on stderr, nothing on stdout."""
    configure_logging("INFO", "json")
    structlog.get_logger("test").info("configured", answer=42)
    captured = capsys.readouterr()
    assert captured.out == ""
    assert '"event": "configured"' in captured.err
    assert '"answer": 42' in captured.err


def test_logging_level_filters(capsys):
    configure_logging("WARNING", "text")
    structlog.get_logger("test").info("hidden")
    assert "hidden" not in capsys.readouterr().err
