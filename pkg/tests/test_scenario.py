"""Tests for scenario models and scenario file loading."""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.common.exceptions import ScenarioSchemaError
from src.model.scenario import (
    NonPersistentClass,
    PersistentUser,
    Scenario,
    load_scenario,
    loading,
    scenario_from_dict,
)


@pytest.fixture
def raw_table1():
    return {
        "channels": 5,
        "scan": 2,
        "non_persistent_classes": [{"lambda": 1.0, "mu": 2.0}],
        "persistent_users": [{"alpha": 1.0, "beta": 1.0, "u": 5.0, "v": 10.0}] * 3,
    }


def test_load_bundled_scenario(table1: Scenario):
    """Test the bundled Table-1 scenario file."""
    assert table1.channels == 5
    assert table1.k == 1
    assert table1.n == 3
    assert table1.rho == pytest.approx(0.5)
    assert table1.profile.theta[2] == pytest.approx(0.9)


def test_build_matches_file(table1: Scenario):
    """Test that building from tuples gives the same scenario."""
    built = Scenario.build(5, scan=2, classes=[(1.0, 2.0)], users=[(1.0, 1.0, 5.0, 10.0)] * 3)
    assert built.fingerprint() == table1.fingerprint()


def test_loading_sums_class_ratios():
    """Test rho = sum lambda_i / mu_i."""
    scenario = Scenario.build(4, scan=1, classes=[(1.0, 2.0), (0.5, 1.0), (0.5, 2.0)])
    assert loading(scenario) == pytest.approx(1.25)


def test_user_ratios():
    """Test the waiting and transmitting weights of a persistent user."""
    user = PersistentUser(alpha=2.0, beta=4.0, u=3.0, v=6.0)
    assert user.wait_ratio == pytest.approx(0.5)
    assert user.transmit_ratio == pytest.approx(0.25)


def test_class_accepts_lambda_alias():
    """Test that 'lambda' and 'lam' both populate the arrival rate."""
    assert NonPersistentClass.model_validate({"lambda": 2.0, "mu": 4.0}).rho == pytest.approx(0.5)
    assert NonPersistentClass(lam=2.0, mu=4.0).rho == pytest.approx(0.5)


def test_custom_theta_scenario():
    """Test a scenario with an explicit profile."""
    scenario = Scenario.build(2, theta=[1.0, 0.5, 0.0], users=[(1.0, 1.0, 1.0, 1.0)])
    assert scenario.profile.theta == (1.0, 0.5, 0.0)
    assert scenario.scan is None


def test_scan_and_theta_are_exclusive(raw_table1):
    """Test that giving both or neither of scan and theta fails."""
    with pytest.raises(ScenarioSchemaError):
        scenario_from_dict({**raw_table1, "theta": [1, 1, 0.9, 0.7, 0.4, 0]})
    without = dict(raw_table1)
    del without["scan"]
    with pytest.raises(ScenarioSchemaError):
        scenario_from_dict(without)


def test_theta_length_must_match_channels(raw_table1):
    """Test theta with the wrong number of entries."""
    data = {**raw_table1, "scan": None, "theta": [1.0, 0.5, 0.0]}
    with pytest.raises(ScenarioSchemaError) as exc_info:
        scenario_from_dict(data)
    assert "channels+1" in str(exc_info.value)


def test_empty_population_rejected():
    """Test that a scenario needs at least one class or user."""
    with pytest.raises(ScenarioSchemaError):
        scenario_from_dict({"channels": 3, "scan": 1})


def test_schema_error_lists_every_field(raw_table1):
    """Test that diagnostics name the failing fields."""
    data = {
        **raw_table1,
        "non_persistent_classes": [{"lambda": -1.0, "mu": 2.0}],
        "persistent_users": [{"alpha": 1.0, "beta": 0.0, "u": 5.0, "v": 10.0}],
    }
    with pytest.raises(ScenarioSchemaError) as exc_info:
        scenario_from_dict(data, source="bad.json")
    details = exc_info.value.details
    assert any("non_persistent_classes.0.lambda" in d for d in details)
    assert any("persistent_users.0.beta" in d for d in details)
    assert str(exc_info.value).startswith("bad.json: ")


def test_unknown_field_rejected(raw_table1):
    """Test that extra keys are reported."""
    with pytest.raises(ScenarioSchemaError):
        scenario_from_dict({**raw_table1, "chanels": 5})


def test_invalid_scan_rejected(raw_table1):
    """Test scan widths outside 1..m."""
    with pytest.raises(ScenarioSchemaError):
        scenario_from_dict({**raw_table1, "scan": 6})


def test_malformed_json_reports_position(tmp_path: Path):
    """Test line and column in JSON decode diagnostics."""
    path = tmp_path / "broken.json"
    path.write_text('{\n  "channels": 5,\n  "scan": \n}', encoding="utf-8")
    with pytest.raises(ScenarioSchemaError) as exc_info:
        load_scenario(path)
    assert "line 4" in exc_info.value.details[0]


def test_missing_file(tmp_path: Path):
    """Test a file that does not exist."""
    with pytest.raises(ScenarioSchemaError):
        load_scenario(tmp_path / "nope.json")


def test_to_json_dict_round_trips(table3: Scenario, tmp_path: Path):
    """Test that a written scenario loads back identically."""
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(table3.to_json_dict()), encoding="utf-8")
    assert load_scenario(path).fingerprint() == table3.fingerprint()


def test_replace_revalidates(table1: Scenario):
    """Test that replace builds a new validated scenario."""
    wider = table1.replace(scan=5)
    assert wider.profile.theta == (1.0,) * 5 + (0.0,)
    assert table1.scan == 2
    with pytest.raises(ValidationError):
        table1.replace(scan=9)


def test_scenarios_are_frozen(table1: Scenario):
    """Test immutability."""
    with pytest.raises(ValidationError):
        table1.channels = 6


def test_fingerprint_depends_on_parameters(table1: Scenario):
    """Test that different scenarios have different fingerprints."""
    assert table1.fingerprint() != table1.replace(channels=6).fingerprint()
