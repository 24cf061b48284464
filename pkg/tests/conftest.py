"""Shared fixtures for crystal-automaton tests."""

import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

# Add project root to path so we can import modules
sys.path.insert(0, str(Path(__file__).parent.parent))

import worked_examples as ex
from config import Config

settings.register_profile("reproducible", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("reproducible")


@pytest.fixture
def rng():
    """Seeded generator for the randomized checks."""
    return random.Random(20240611)


@pytest.fixture
def two_soliton_states():
    """Rows of the two-soliton run under T_infinity."""
    return ex.two_soliton_states()


@pytest.fixture
def overtaking_states():
    """Rows of the overtaking run under T_1 on capacity-2 boxes."""
    return ex.overtaking_states()


@pytest.fixture
def double_scattering_states():
    """Rows of the two-collision run on the inhomogeneous strip."""
    return ex.double_scattering_states()


@pytest.fixture
def sample_config(tmp_path):
    """Pre-configured Config instance for testing."""
    return Config(
        extension_cap=10_000,
        separation_margin=2,
        scatter_max_steps=500,
        oracle_max_size=50_000,
        seed=7,
        random_cases=5,
        concurrent_experiments=2,
        output_dir=tmp_path / "results",
    )


@pytest.fixture
def config_toml_content():
    """Sample config.toml content."""
    return """
extension_cap = 5000
separation_margin = 3
scatter_max_steps = 100
seed = 42
output_dir = "/tmp/custom-results"
"""
