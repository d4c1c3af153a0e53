"""
Pytest configuration file with fixtures and settings for testing.
"""

import math

import numpy as np
import pytest
from dotenv import load_dotenv

from core.params import ModelParams, PhasePoint
from core.qnumeric import _xi_cache

# Load environment variables
load_dotenv()


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long integrations or fine-grid eigensolves")


@pytest.fixture(scope="session")
def sphere_params():
    """Isotropic oscillator on the unit sphere."""
    return ModelParams(kappa=1.0, omega=1.0, gamma=1.0, ratio=(1, 1))


@pytest.fixture(scope="session")
def sphere_two_to_one():
    """2:1 oscillator on the unit sphere."""
    return ModelParams.from_ratio(1.0, 1.0, 2, 1)


@pytest.fixture(scope="session")
def hyperboloid_params():
    """Isotropic oscillator on the unit hyperboloid with five bound xi-levels."""
    return ModelParams(kappa=-1.0, omega=5.0, gamma=1.0, ratio=(1, 1))


@pytest.fixture(scope="session")
def flat_params():
    """Flat 2:1 oscillator."""
    return ModelParams.from_ratio(0.0, 1.0, 2, 1)


@pytest.fixture(scope="session")
def irrational_params():
    """Sphere oscillator with gamma = sqrt(2)."""
    return ModelParams(kappa=1.0, omega=1.0, gamma=math.sqrt(2.0))


@pytest.fixture(scope="session")
def sample_state():
    """A bound state inside every chart used in the tests."""
    return PhasePoint(x=0.2, y=0.3, px=0.1, py=0.0)


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def setup_test_environment(tmp_path, monkeypatch):
    """Setup test environment before each test."""
    monkeypatch.setenv("TESTING", "true")
    monkeypatch.setenv("CURVOSC_OUTPUT_DIR", str(tmp_path / "output"))

    yield

    _xi_cache.clear()
