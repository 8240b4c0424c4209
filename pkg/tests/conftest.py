"""
Pytest configuration and shared fixtures.
"""

import logging

import numpy as np
import pytest

from pseudolab.config import reset_runtime_settings
from pseudolab.flow import SweepConfig
from pseudolab.grid import ScalarField, SpatialGrid, TimeGrid
from pseudolab.logger import set_level
from pseudolab.pde import BBMCoefficients
from pseudolab.weights import assemble_weights, build_eta_sweep_1d, r_on_time_grid


@pytest.fixture(autouse=True)
def clean_env_for_tests(monkeypatch):
    """Clean environment variables for test isolation.

    Clears every LAB_* variable and forgets the cached runtime settings so
    that each test sees the defaults unless it sets variables itself. The
    package log level is restored afterwards since the CLI changes it.

    This fixture is applied automatically to all tests (autouse=True).
    """
    monkeypatch.delenv("LAB_THREADS", raising=False)
    monkeypatch.delenv("LAB_LOG_LEVEL", raising=False)
    reset_runtime_settings()
    yield
    reset_runtime_settings()
    set_level(logging.INFO)


@pytest.fixture
def small_grid() -> SpatialGrid:
    """1D grid with 15 interior nodes on (0, 1)."""
    return SpatialGrid.interval(0.0, 1.0, 15)


@pytest.fixture
def small_time() -> TimeGrid:
    return TimeGrid(horizon=1.0, steps=10)


@pytest.fixture
def sweep() -> SweepConfig:
    return SweepConfig()


@pytest.fixture
def unit_advection() -> BBMCoefficients:
    return BBMCoefficients.constant((1.0,))


@pytest.fixture
def first_mode():
    """Factory for sin(pi x) on a 1D grid over (0, 1)."""

    def _make(grid: SpatialGrid) -> ScalarField:
        return ScalarField.from_function(grid, lambda x: np.sin(np.pi * x[:, 0]))

    return _make


@pytest.fixture
def carleman_setup(sweep):
    """Weights and nested sweep regions on a 31 x 24 space-time grid."""
    grid = SpatialGrid.interval(0.0, 1.0, 31)
    time = TimeGrid(horizon=1.0, steps=24)
    eta = build_eta_sweep_1d(sweep, grid, time)
    weights = assemble_weights(eta, r_on_time_grid(time, 0.1), lam=2.0, s=1.0, tau_margin=0.1)
    regions = {level: sweep.region(grid, time, level=level) for level in (0, 1, 2, 4)}
    return grid, time, weights, regions
