"""Tests for success probability profiles."""

import math

import numpy as np
import pytest

from src.common.exceptions import InvalidParameterError, ProfileValidationError
from src.model.profile import SuccessProfile, sample_scan_success, scan_success_profile, validate_profile


def test_scan_profile_values():
    """Test the scan profile for m=5, s=2 against hand-computed values."""
    profile = scan_success_profile(5, 2)
    assert profile.channels == 5
    assert profile.theta == pytest.approx((1.0, 1.0, 0.9, 0.7, 0.4, 0.0), abs=1e-15)


def test_full_scan_is_loss_system():
    """Test that scanning every channel gives theta = 1 below m."""
    profile = scan_success_profile(7, 7)
    assert profile.theta == (1.0,) * 7 + (0.0,)


def test_single_scan_is_random_channel():
    """Test that s=1 gives theta(b) = 1 - b/m."""
    profile = scan_success_profile(10, 1)
    for b in range(11):
        assert profile[b] == pytest.approx(1.0 - b / 10, abs=1e-15)


@pytest.mark.parametrize("m", [1, 2, 10, 100])
def test_scan_profile_monotone(m: int):
    """Test theta is non-increasing in b and non-decreasing in s."""
    previous = None
    for s in range(1, m + 1):
        profile = scan_success_profile(m, s)
        assert all(profile[b] >= profile[b + 1] for b in range(m))
        if previous is not None:
            assert all(profile[b] >= previous[b] - 1e-15 for b in range(m + 1))
        previous = profile


def test_large_channel_count_has_no_overflow():
    """Test that m=1000 stays finite and satisfies the axioms."""
    profile = scan_success_profile(1000, 500)
    assert len(profile) == 1001
    assert 0.0 < profile[999] <= 1.0


@pytest.mark.parametrize("m,s", [(0, 1), (5, 0), (5, 6), (-1, 1)])
def test_scan_profile_rejects_bad_parameters(m: int, s: int):
    """Test invalid channel count or scan width."""
    with pytest.raises(InvalidParameterError):
        scan_success_profile(m, s)


def test_validate_profile_accepts_custom_table():
    """Test a valid custom profile."""
    profile = validate_profile([1.0, 0.5, 0.25, 0.0])
    assert isinstance(profile, SuccessProfile)
    assert profile.channels == 3


@pytest.mark.parametrize(
    "theta,axiom,index",
    [
        ([1.2, 0.5, 0.0], "range", 0),
        ([1.0, -0.1, 0.0], "range", 1),
        ([1.0, 0.0, 0.0], "positive", 1),
        ([1.0, 0.5, 0.1], "full_blocks", 2),
    ],
)
def test_validate_profile_names_failing_axiom(theta, axiom: str, index: int):
    """Test that violations report the axiom and index."""
    with pytest.raises(ProfileValidationError) as exc_info:
        validate_profile(theta)
    assert exc_info.value.axiom == axiom
    assert exc_info.value.index == index


def test_profile_needs_two_entries():
    """Test that a single-entry profile is rejected."""
    with pytest.raises(InvalidParameterError):
        validate_profile([0.0])


def test_sampled_scan_success_matches_formula():
    """Test the Monte-Carlo estimate against the closed form."""
    profile = scan_success_profile(8, 3)
    estimate = sample_scan_success(8, 3, 6, trials=50_000, seed=7)
    assert estimate == pytest.approx(profile[6], abs=0.01)


def test_sampled_scan_success_is_seeded():
    """Test that the same seed gives the same estimate."""
    assert sample_scan_success(6, 2, 4, trials=1000, seed=3) == sample_scan_success(6, 2, 4, trials=1000, seed=3)


def test_every_scan_profile_is_valid():
    """Test the axioms for every scan width of every system up to 200 channels."""
    for m in range(1, 201):
        for s in range(1, m + 1):
            profile = scan_success_profile(m, s)
            assert validate_profile(profile.theta) == profile


@pytest.mark.parametrize("seed", range(8))
def test_sampled_scan_success_within_three_standard_errors(seed: int):
    """Test the Monte-Carlo frequency at a random (m, s, b) over 10^5 subsets."""
    rng = np.random.default_rng(1000 + seed)
    m = int(rng.integers(1, 31))
    s = int(rng.integers(1, m + 1))
    b = int(rng.integers(0, m + 1))
    trials = 100_000
    expected = scan_success_profile(m, s)[b]
    estimate = sample_scan_success(m, s, b, trials=trials, seed=seed)
    stderr = math.sqrt(expected * (1.0 - expected) / trials)
    assert abs(estimate - expected) <= 3.0 * stderr + 1e-12
