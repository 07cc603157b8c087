"""Tests for the brute-force state-space oracle."""

import math

import numpy as np
import pytest

from src.analysis.mixed import MixedAnalyzer
from src.common.config import NumericsConfig, OracleConfig
from src.common.exceptions import OracleScopeError
from src.common.types import ActivityCycle, ActivityState
from src.model.scenario import Scenario
from src.oracle import generator as generator_module
from src.oracle.generator import (
    aggregate_by_total,
    audit_detailed_balance,
    build_generator,
    check_dense_memory,
    coefficient_discrepancy,
    dense_memory_mb,
    detailed_balance_residual,
    global_balance_residual,
    product_form_discrepancy,
    solve_global_balance,
    verify_scenario,
)
from src.oracle.states import enumerate_states, estimate_state_count

I, W, T = ActivityState.IDLE, ActivityState.WAITING, ActivityState.TRANSMITTING


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Small random scenario with log-uniform rates in [0.1, 10]."""

    def rate() -> float:
        return float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))

    m = int(rng.integers(1, 5))
    k = int(rng.integers(0, 3))
    n = int(rng.integers(0 if k else 1, 4))
    return Scenario.build(
        m,
        scan=int(rng.integers(1, m + 1)),
        classes=[(rate(), rate()) for _ in range(k)],
        users=[(rate(), rate(), rate(), rate()) for _ in range(n)],
    )


def test_single_user_rates(minimal: Scenario):
    """Test the three-state chain of one persistent user."""
    states = enumerate_states(minimal)
    assert len(states) == 3
    generator = build_generator(minimal, states)
    i, w, t = (states.index_of((), (s,)) for s in (I, W, T))
    user = minimal.users[0]
    assert generator.rates[i, w] == user.alpha
    assert generator.rates[w, i] == user.beta
    assert generator.rates[w, t] == user.u * minimal.profile[0]
    assert generator.rates[t, w] == user.v


def test_state_count_estimate_is_exact(table1: Scenario, table3: Scenario):
    for scenario in (table1, table3):
        assert estimate_state_count(scenario) == len(enumerate_states(scenario))


def test_states_are_legitimate_and_unique(table1: Scenario):
    states = enumerate_states(table1)
    keys = {s.key for s in states}
    assert len(keys) == len(states)
    assert all(s.busy <= table1.channels for s in states)
    assert states[0].label() == "(0;I,I,I)"


def test_oracle_refuses_large_instances(table3: Scenario):
    with pytest.raises(OracleScopeError) as exc_info:
        enumerate_states(table3, limit=100)
    assert exc_info.value.limit == 100


def test_table1_matches_product_form(table1: Scenario):
    """Test the m=5, s=2 scenario against the linear solve."""
    summary = verify_scenario(table1)
    assert summary.states == 135
    assert summary.global_residual <= 1e-10
    assert summary.detailed_residual <= 1e-10
    assert summary.product_form_discrepancy <= 1e-10
    assert summary.passed()


@pytest.mark.parametrize("seed", range(50))
def test_randomized_equivalence(seed: int):
    """Test product form against the oracle on random small instances."""
    scenario = random_scenario(np.random.default_rng(seed))
    states = enumerate_states(scenario, limit=2000)
    generator = build_generator(scenario, states)
    pi = solve_global_balance(generator)
    assert global_balance_residual(generator, pi) <= 1e-10
    assert detailed_balance_residual(generator, pi) <= 1e-10
    assert product_form_discrepancy(scenario, states, pi) <= 1e-10


def test_aggregated_mass_matches_oracle(table1: Scenario):
    """Test q(x; a) against oracle probabilities summed by total occupancy."""
    states = enumerate_states(table1)
    pi = solve_global_balance(build_generator(table1, states))
    analyzer = MixedAnalyzer(table1)
    for (x, a), mass in aggregate_by_total(states, pi).items():
        assert analyzer.aggregated_mass(x, a) == pytest.approx(mass, abs=1e-10)


def test_return_to_idle_breaks_detailed_balance(minimal: Scenario):
    """Test that the T -> I cycle is flagged by the audit."""
    states = enumerate_states(minimal)
    generator = build_generator(minimal, states, cycle=ActivityCycle.RETURN_TO_IDLE)
    pi = solve_global_balance(generator)
    assert global_balance_residual(generator, pi) <= 1e-12
    violations = audit_detailed_balance(generator, pi)
    assert violations
    assert detailed_balance_residual(generator, pi) > 1e-3
    assert math.isclose(pi.sum(), 1.0)


def test_verify_uses_configured_limit(table1: Scenario):
    with pytest.raises(OracleScopeError):
        verify_scenario(table1, OracleConfig(state_limit=10))


def test_summary_to_dict(table1: Scenario):
    data = verify_scenario(table1).to_dict()
    assert set(data) == {
        "states",
        "global_balance_residual",
        "detailed_balance_residual",
        "violations",
        "product_form_discrepancy",
        "coefficient_discrepancy",
    }


def test_dense_memory_estimate():
    assert dense_memory_mb(1024) == pytest.approx(24.0)
    check_dense_memory(1024, limit_mb=24)
    with pytest.raises(OracleScopeError) as exc_info:
        check_dense_memory(1024, limit_mb=23)
    assert exc_info.value.limit == 23
    assert "1024 states" in str(exc_info.value)


def test_dense_memory_refusal_inside_state_limit():
    """Test refusal of a state space the count limit admits but memory does not."""
    scenario = Scenario.build(12, scan=2, classes=[(1.0, 1.0), (2.0, 1.0)], users=[(1.0, 1.0, 5.0, 10.0)] * 6)
    count = estimate_state_count(scenario)
    assert count <= OracleConfig().state_limit
    with pytest.raises(OracleScopeError) as exc_info:
        verify_scenario(scenario)
    assert exc_info.value.estimate > exc_info.value.limit == OracleConfig().dense_memory_limit_mb
    assert f"{count} states" in str(exc_info.value)


def test_blocked_audit_matches_single_block(minimal: Scenario, table1: Scenario, monkeypatch):
    """Test that row blocks of a few states give the same audit as one block."""
    for scenario, cycle in ((table1, ActivityCycle.RETURN_TO_WAITING), (minimal, ActivityCycle.RETURN_TO_IDLE)):
        states = enumerate_states(scenario)
        generator = build_generator(scenario, states, cycle=cycle)
        pi = solve_global_balance(generator)
        residual = detailed_balance_residual(generator, pi)
        violations = audit_detailed_balance(generator, pi)
        monkeypatch.setattr(generator_module, "AUDIT_BLOCK_ELEMENTS", 2 * len(states))
        assert detailed_balance_residual(generator, pi) == residual
        assert audit_detailed_balance(generator, pi) == violations
        monkeypatch.undo()


def test_coefficient_check_uses_configured_references(table3: Scenario):
    """Test enumeration, then convolution, then no reference as limits shrink."""
    enumerated = coefficient_discrepancy(table3.users)
    assert enumerated is not None and enumerated <= 1e-9
    convolved = coefficient_discrepancy(table3.users, OracleConfig(enumeration_limit=2))
    assert convolved is not None and convolved <= 1e-9
    skipped = coefficient_discrepancy(
        table3.users, OracleConfig(enumeration_limit=2), NumericsConfig(convolution_limit=2)
    )
    assert skipped is None


def test_verify_reports_coefficient_check(table1: Scenario):
    summary = verify_scenario(table1)
    assert summary.coefficient_discrepancy is not None
    assert summary.coefficient_discrepancy <= 1e-9
    assert summary.passed()
    assert not summary.passed(coefficient_tolerance=-1.0)
