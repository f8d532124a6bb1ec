"""
Common fixtures for lowmach tests.

This file provides pytest fixtures that can be shared across test files.
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to path
project_root = str(Path(__file__).parents[2])
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from lowmach.config import get_settings
from lowmach.numerics.grid import ScalarField, make_grid
from lowmach.physics.constitutive import PhysParams, PotentialSpec, PressureLaw, ViscosityLaw

DEFAULT_SEED = 20240611


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Keep logs and metrics of every test inside its temporary directory."""
    monkeypatch.setenv("LOWMACH_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setenv("LOWMACH_METRICS_DIR", str(tmp_path / "metrics"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    """Seeded generator; ``LOWMACH_SEED`` overrides the default seed."""
    return np.random.default_rng(int(os.environ.get("LOWMACH_SEED", DEFAULT_SEED)))


@pytest.fixture
def grid_1d():
    return make_grid(64, 1, 1.0, 1.0, "walls")


@pytest.fixture
def grid_2d():
    return make_grid(32, 32, 1.0, 1.0, "walls")


@pytest.fixture
def periodic_2d():
    return make_grid(32, 32, 1.0, 1.0, "periodic")


@pytest.fixture(params=["walls", "periodic"])
def any_grid_2d(request):
    return make_grid(24, 16, 1.0, 0.75, request.param)


@pytest.fixture
def params():
    """Default physics with a small viscosity."""
    return PhysParams(
        pressure=PressureLaw(gamma=2.4, a=1.0),
        potential=PotentialSpec(),
        viscosity=ViscosityLaw(nu0=0.1),
    )


def smooth_profile(grid, amplitude: float = 0.5) -> ScalarField:
    """Smooth field compatible with both boundary conditions."""
    return ScalarField.from_function(
        grid,
        lambda x, y: amplitude * np.cos(2 * np.pi * x / grid.lx) * (1.0 + 0.3 * np.cos(2 * np.pi * y / grid.ly)),
    )


@pytest.fixture
def write_config(tmp_path):
    """Write a key = value config file and return its path."""

    def _write(text: str, name: str = "run.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write
