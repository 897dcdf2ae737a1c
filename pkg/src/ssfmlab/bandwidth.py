"""Grid search for the low-pass filter bandwidth of a scenario."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import runner

if TYPE_CHECKING:  # pragma: no cover
    from .harness import Scenario

__all__ = ["BandwidthSweep", "default_fractions", "sweep_bandwidth"]


def default_fractions(step: float = 0.01) -> tuple[float, ...]:
    """Search grid from 0.50 to 1.00 inclusive in steps of ``step``."""
    count = round(0.5 / step)
    if not math.isclose(count * step, 0.5, rel_tol=1e-9):
        raise ValueError(f"step {step} does not divide the 0.50..1.00 range")
    return tuple(round(0.5 + i * step, 12) for i in range(count + 1))


@dataclass(frozen=True)
class BandwidthSweep:
    """NSD of one scenario across filter fractions, plus the best point."""

    fractions: tuple[float, ...]
    nsd_values: tuple[float, ...]
    best_fraction: float
    best_nsd: float

    def value_at(self, fraction: float) -> float:
        return self.nsd_values[self.fractions.index(fraction)]


def _validate_fractions(fractions: Sequence[float]) -> tuple[float, ...]:
    fractions = tuple(float(f) for f in fractions)
    if not fractions:
        raise ValueError("fraction grid is empty")
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"filter fraction {f} outside (0, 1]")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ValueError("fraction grid must be strictly ascending")
    if fractions[-1] != 1.0:
        raise ValueError("fraction grid must contain 1.0")
    return fractions


def _select_best(fractions: Sequence[float], values: Sequence[float]) -> tuple[float, float]:
    """Smallest NSD wins; ties go to the largest fraction."""
    best = min(values)
    for fraction, value in zip(reversed(fractions), reversed(values)):
        if value == best:
            return fraction, value
    return fractions[-1], best  # pragma: no cover - min always present


def sweep_bandwidth(
    scenario: "Scenario",
    fractions: Sequence[float] | None = None,
    threads: int = 1,
    launch_fields: np.ndarray | None = None,
    bench_fields: np.ndarray | None = None,
) -> BandwidthSweep:
    """Evaluate a scenario's seed-averaged NSD over a filter-fraction grid.

    The fraction grid must be strictly ascending, lie in (0, 1] and contain
    1.0 so the unfiltered scheme is always a candidate.  Benchmark outputs
    are computed once per seed and reused across all fractions; callers that
    already hold them can pass ``launch_fields``/``bench_fields`` to skip the
    recomputation.  A fraction whose propagation diverges is recorded as
    NSD = +inf rather than failing the sweep.
    """
    fractions = _validate_fractions(fractions if fractions is not None else default_fractions())
    if launch_fields is None:
        launch_fields = runner.shaped_fields(scenario)
    if bench_fields is None:
        bench_fields = runner.benchmark_fields(scenario)

    def evaluate(fraction: float) -> float:
        per_seed = runner.fraction_nsds(scenario, fraction, launch_fields, bench_fields)
        return float(np.mean(per_seed))

    if threads == 1 or len(fractions) == 1:
        values = tuple(evaluate(f) for f in fractions)
    else:
        workers = threads if threads > 0 else min(len(fractions), os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = tuple(pool.map(evaluate, fractions))
    best_fraction, best_nsd = _select_best(fractions, values)
    return BandwidthSweep(
        fractions=fractions,
        nsd_values=values,
        best_fraction=best_fraction,
        best_nsd=best_nsd,
    )
