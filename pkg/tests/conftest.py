import dataclasses

import numpy as np
import pytest
from hypothesis import settings

from ssfmlab import FiberParams, LaunchSpec, Scenario, gen_symbols, make_grid, shape_pulse

# CI boxes vary; deadlines only cause flakes on the FFT-heavy properties.
settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_grid():
    # 16 symbols at 8 samples/symbol, 100 ps symbols
    return make_grid(16, 8, 100.0)


@pytest.fixture
def small_waveform(small_grid):
    launch = LaunchSpec(power_dbm=3.0)
    return shape_pulse(gen_symbols(7, 16), small_grid, launch)


def tiny_scenario(**overrides):
    """A scenario small enough for sub-second sweeps in unit tests."""
    base = dict(
        fiber=FiberParams(beta2=-21.7, gamma=1.27, span_km=20.0),
        launch=LaunchSpec(power_dbm=6.0),
        candidate_spp=6,
        candidate_dz_km=2.0,
        n_symbols=16,
        seeds=(0, 1),
        benchmark_spp=12,
        benchmark_dz_km=0.5,
    )
    base.update(overrides)
    return Scenario(**base)


def replace(scenario, **overrides):
    return dataclasses.replace(scenario, **overrides)
