"""Tests for the all non-persistent system."""

import itertools
import math

import pytest

from src.analysis.nonpersistent import (
    busy_distribution,
    class_throughput,
    erlang_b,
    normalizer_A,
    state_mass,
    success_probability,
)
from src.common.exceptions import InvalidParameterError, InvalidStateError
from src.model.profile import scan_success_profile
from src.model.scenario import NonPersistentClass


@pytest.mark.parametrize("m", range(1, 21))
@pytest.mark.parametrize("factor", [0.5, 1.0, 2.0, 5.0])
def test_full_scan_reduces_to_erlang_b(m: int, factor: float):
    """Test phi = 1 - ErlangB(m, rho) when every channel is scanned."""
    rho = factor * m
    phi = success_probability(scan_success_profile(m, m), rho)
    assert phi == pytest.approx(1.0 - erlang_b(m, rho), rel=1e-10)


def test_erlang_b_known_value():
    """Test a textbook value: 2 servers, 1 Erlang."""
    assert erlang_b(2, 1.0) == pytest.approx(0.2)
    assert erlang_b(0, 3.0) == 1.0


def test_zero_load():
    """Test that rho = 0 leaves every channel idle."""
    profile = scan_success_profile(4, 1)
    distribution = busy_distribution(profile, 0.0)
    assert distribution.probabilities == (1.0, 0.0, 0.0, 0.0, 0.0)
    assert float(normalizer_A(profile, 0.0)) == 1.0
    assert success_probability(profile, 0.0) == 1.0


def test_single_channel_closed_form():
    """Test m=1: P[busy] = rho / (1 + rho)."""
    profile = scan_success_profile(1, 1)
    distribution = busy_distribution(profile, 3.0)
    assert distribution[1] == pytest.approx(0.75)
    assert float(distribution.normalizer) == pytest.approx(0.25)
    assert success_probability(profile, 3.0) == pytest.approx(0.25)


def test_busy_distribution_properties():
    """Test normalization and the mean of the busy distribution."""
    profile = scan_success_profile(10, 2)
    distribution = busy_distribution(profile, 5.0)
    assert len(distribution) == 11
    assert distribution.channels == 10
    assert math.fsum(distribution.probabilities) == pytest.approx(1.0, abs=1e-12)
    assert 0 < distribution.mean < 10


def test_heavy_load_does_not_overflow():
    """Test m=1000 at a load where rho^m overflows a double."""
    profile = scan_success_profile(1000, 5)
    A = normalizer_A(profile, 2000.0)
    assert A.log10() < -300
    phi = success_probability(profile, 2000.0)
    assert 0.0 < phi < 1.0


@pytest.mark.parametrize("rho", [-1.0, float("nan"), float("inf")])
def test_invalid_load(rho: float):
    with pytest.raises(InvalidParameterError):
        normalizer_A(scan_success_profile(3, 1), rho)


def test_state_masses_sum_to_one():
    """Test that p(x) summed over all occupancy vectors is 1."""
    profile = scan_success_profile(4, 2)
    classes = [NonPersistentClass(lam=1.0, mu=2.0), NonPersistentClass(lam=3.0, mu=1.0)]
    total = math.fsum(
        state_mass(profile, classes, x)
        for x in itertools.product(range(5), repeat=2)
        if sum(x) <= 4
    )
    assert total == pytest.approx(1.0, abs=1e-12)


def test_state_mass_aggregates_to_busy_distribution():
    """Test sum over sum(x) = b of p(x) against P[b busy]."""
    profile = scan_success_profile(3, 1)
    classes = [NonPersistentClass(lam=1.0, mu=1.0), NonPersistentClass(lam=2.0, mu=4.0)]
    distribution = busy_distribution(profile, 1.5)
    for b in range(4):
        mass = sum(
            state_mass(profile, classes, x) for x in itertools.product(range(4), repeat=2) if sum(x) == b
        )
        assert mass == pytest.approx(distribution[b], abs=1e-14)


@pytest.mark.parametrize("x", [[1], [1, 2, 0], [-1, 0], [3, 2], [0.5, 0]])
def test_state_mass_rejects_bad_states(x):
    profile = scan_success_profile(4, 2)
    classes = [NonPersistentClass(lam=1.0, mu=1.0)] * 2
    with pytest.raises(InvalidStateError):
        state_mass(profile, classes, x)


def test_success_probability_increases_with_scan():
    """Test phi is non-decreasing in s at fixed m and rho."""
    values = [success_probability(scan_success_profile(10, s), 5.0) for s in range(1, 11)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


def test_class_throughput_split():
    """Test accepted and dropped rates."""
    rates = class_throughput([NonPersistentClass(lam=2.0, mu=1.0)], 0.75)
    assert rates[0].accepted == pytest.approx(1.5)
    assert rates[0].dropped == pytest.approx(0.5)
