"""Seed-batched evaluation of benchmark/candidate scenario runs.

A scenario (defined in :mod:`ssfmlab.harness`) is consumed here purely
through its parameter attributes.  All seeds of a scenario are propagated
together as the rows of one 2-D field array, which keeps long sweeps cheap;
rows evolve independently, so per-seed results do not depend on the batch.
Rows that diverge to non-finite values are reported as NSD = +inf instead of
aborting the run.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from . import engine
from .metrics import nsd
from .signals import SamplingGrid, Waveform, gen_symbols, make_grid, shape_pulse

if TYPE_CHECKING:  # pragma: no cover
    from .harness import Scenario

__all__ = ["candidate_grid", "benchmark_grid", "shaped_fields", "benchmark_fields", "fraction_nsds"]


def candidate_grid(scenario: "Scenario") -> SamplingGrid:
    return make_grid(scenario.n_symbols, scenario.candidate_spp, scenario.launch.symbol_time)


def benchmark_grid(scenario: "Scenario") -> SamplingGrid:
    return make_grid(scenario.n_symbols, scenario.benchmark_spp, scenario.launch.symbol_time)


def _shaped_batch(scenario: "Scenario", grid: SamplingGrid) -> np.ndarray:
    rows = [
        shape_pulse(gen_symbols(seed, scenario.n_symbols), grid, scenario.launch).samples
        for seed in scenario.seeds
    ]
    return np.array(rows)


def shaped_fields(scenario: "Scenario") -> np.ndarray:
    """Candidate-grid launch fields, one row per seed."""
    return _shaped_batch(scenario, candidate_grid(scenario))


def benchmark_fields(scenario: "Scenario") -> np.ndarray:
    """Benchmark outputs (fine grid, fine step, unfiltered), one row per seed."""
    grid = benchmark_grid(scenario)
    cfg = engine.SsfmConfig.from_step(
        scenario.fiber.span_km, scenario.benchmark_dz_km, filter_fraction=1.0
    )
    h = engine.linear_multiplier(grid, scenario.fiber, cfg).values
    fields = _shaped_batch(scenario, grid)
    return engine._run_segments(fields, h, scenario.fiber.gamma * cfg.dz_km, cfg.n_seg)


def fraction_nsds(
    scenario: "Scenario",
    fraction: float,
    launch_fields: np.ndarray,
    bench_fields: np.ndarray,
) -> np.ndarray:
    """Per-seed NSD of one filtered candidate run against cached benchmarks.

    ``launch_fields`` are candidate-grid inputs from :func:`shaped_fields`
    and ``bench_fields`` benchmark outputs from :func:`benchmark_fields`.
    Seeds whose candidate or benchmark run diverged yield +inf.
    """
    grid_c = candidate_grid(scenario)
    grid_b = benchmark_grid(scenario)
    cfg = engine.SsfmConfig.from_step(
        scenario.fiber.span_km, scenario.candidate_dz_km, filter_fraction=fraction
    )
    h = engine.linear_multiplier(grid_c, scenario.fiber, cfg).values
    outputs = engine._run_segments(launch_fields, h, scenario.fiber.gamma * cfg.dz_km, cfg.n_seg)
    span = scenario.fiber.span_km
    values = np.empty(len(scenario.seeds))
    for i, (out_row, bench_row) in enumerate(zip(outputs, bench_fields)):
        if not (np.all(np.isfinite(out_row)) and np.all(np.isfinite(bench_row))):
            values[i] = math.inf
            continue
        reference = Waveform(samples=bench_row, grid=grid_b, z_km=span)
        candidate = Waveform(samples=out_row, grid=grid_c, z_km=span)
        values[i] = nsd(reference, candidate).nsd
    return values
