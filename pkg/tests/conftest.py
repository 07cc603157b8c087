"""Pytest configuration and common fixtures.

This module contains pytest configuration and common fixtures used across
test modules. It also ensures the src package is in the Python path.
"""

import sys
from pathlib import Path

import pytest

# Add the project root directory to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.model.scenario import Scenario, load_scenario  # noqa: E402

SCENARIO_DIR = project_root / "scenarios"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow simulation tests")


# Configure pytest-asyncio
def pytest_configure(config):
    """Configure pytest-asyncio to use function scope for event loops."""
    config.option.asyncio_mode = "strict"
    config.option.asyncio_default_fixture_loop_scope = "function"


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture
def table1() -> Scenario:
    """m=5, s=2, rho=0.5, three identical persistent users."""
    return load_scenario(SCENARIO_DIR / "table1.json")


@pytest.fixture
def table3() -> Scenario:
    """m=10, s=2, rho=1, three class-A and three class-B users."""
    return load_scenario(SCENARIO_DIR / "table3.json")


@pytest.fixture
def minimal() -> Scenario:
    """One channel, one persistent user, no classes."""
    return load_scenario(SCENARIO_DIR / "minimal.json")
