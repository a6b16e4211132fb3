"""Shared grids, fields and run configurations."""
import numpy as np
import pytest

from src.nlkg.evolution.state import State
from src.nlkg.schemas.contracts import RunConfig
from src.nlkg.spectral.grid import RadialField, RadialGrid
from src.nlkg.synthetic.initial_data import band_limited, gaussian, rough_spectral


@pytest.fixture
def grid():
    return RadialGrid(30.0, 512)


@pytest.fixture
def small_grid():
    return RadialGrid(20.0, 256)


@pytest.fixture
def gaussian_field(grid):
    return RadialField(grid, np.exp(-grid.r ** 2))


@pytest.fixture
def gaussian_state(small_grid):
    return gaussian(small_grid, 1.0)


@pytest.fixture
def small_data(small_grid):
    return band_limited(small_grid, 0.1, width=1.0, cutoff=4.0)


@pytest.fixture
def rough_state():
    return rough_spectral(RadialGrid(30.0, 1024), 0.5, s=0.95, seed=668)


def zero_state(grid):
    return State.zeros(grid)


@pytest.fixture
def tiny_config():
    """A configuration small enough for harness tests to run in well under a second per command."""
    def make(**overrides):
        raw = {
            "p": 4.0,
            "s": 0.95,
            "N": 8,
            "N_list": [4, 8],
            "p_list": [3.5, 4.0],
            "grid": {"R": 12.0, "n": 64},
            "evolution": {"dt": 0.01, "T": 0.2, "sample_stride": 1},
            "data": {"kind": "gaussian", "amplitude": 0.1},
            "kernel": {"M_list": [4], "n_t": 3},
        }
        for key, value in overrides.items():
            section, _, leaf = key.partition(".")
            if leaf:
                raw.setdefault(section, {})[leaf] = value
            else:
                raw[key] = value
        return RunConfig.model_validate(raw)

    return make
