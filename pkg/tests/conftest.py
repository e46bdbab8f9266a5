"""
Pytest Configuration and Shared Fixtures

This module provides shared fixtures and configuration for all tests.
"""

import os
import sys
import tempfile
import pytest
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))


@pytest.fixture
def temp_config_file():
    """Create a temporary config.yaml file for testing."""
    config_content = """
logging:
  level: "DEBUG"
  format: "%(levelname)s %(message)s"
  file: "test_toolkit.log"
  console: true
  file_logging: false
  max_bytes: 1024
  backup_count: 1

abc:
  n_draws: 2000
  quantile: 0.05
  workers: 2
  chunk_size: 100
  kde_grid_points: 128

models:
  ma2:
    prior_box: [[-2.0, 2.0], [-1.0, 1.0]]
    search_box: [[-4.0, 4.0], [-2.0, 6.0]]
  lotka_volterra:
    theta0: [1.0, 1.0]
    n_points: 150
    noise_sd: [0.5, 0.5]

binding:
  preimage_grid: 200
  tau: 0.02

diagnostics:
  jump_threshold: 2.5

analytic:
  delta: 0.2

experiments:
  tiny-sweep:
    command: "sweep"
    theta0: 0.0
    delta: 0.1
    epsilon_grid: [1.0, 0.1]
    size_grid: [10, 100]
  tiny-abc:
    command: "abc"
    model: "ma2"
    theta0: [0.6, 0.2]
    sizes: [200]
    statistic_sets: ["eta2"]
    n_draws: 500
    quantile: 0.1
"""
    with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
        f.write(config_content)
        temp_path = f.name

    yield temp_path

    # Cleanup
    if os.path.exists(temp_path):
        os.remove(temp_path)


@pytest.fixture(autouse=True)
def reset_config_singleton():
    """Reset ConfigLoader singleton between tests."""
    from utils.config_loader import ConfigLoader
    ConfigLoader._instance = None
    yield
    ConfigLoader._instance = None


@pytest.fixture(autouse=True)
def clean_env():
    """Clean environment variables before and after tests."""
    original_env = os.environ.copy()
    yield
    # Restore original environment
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture
def quiet_logging(tmp_path, monkeypatch):
    """Run CLI tests from a scratch directory so log files land there."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def ma2_observed():
    """Seeded MA(2) series at (0.6, 0.2), T = 500."""
    from series_models import MA2Model
    return MA2Model().observe((0.6, 0.2), 500, 11)


@pytest.fixture
def small_abc_config():
    """Quantile-mode settings small enough for unit tests."""
    from abc_engine import AbcConfig
    return AbcConfig(n_draws=2000, seed=5, quantile=0.05, chunk_size=250)
