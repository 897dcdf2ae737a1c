"""Experiment harness: scenario files, axis sweeps, presets and CSV output.

A scenario bundles one channel/transmitter configuration with a coarse
candidate discretization and the fine benchmark discretization it is judged
against.  Scenario files are flat ``key = value`` text (``#`` starts a
comment).  Interface units are ps, km, dBm and GHz; internally everything
runs in ps/km/W.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bandwidth, runner
from .engine import BENCHMARK_DZ_KM, BENCHMARK_SPP, FiberParams, SsfmConfig, propagate
from .metrics import NsdReport
from .signals import LaunchSpec, Waveform

__all__ = [
    "AXES",
    "PRESETS",
    "Scenario",
    "ScenarioError",
    "SweepResult",
    "SweepJob",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
    "sweep",
    "emit_csv",
    "write_trace_csv",
    "preset_jobs",
    "reproduce_fig2",
]

log = logging.getLogger(__name__)

AXES = ("distance", "power", "dt", "bandwidth")
PRESETS = ("fig2", "fig3a", "fig3b", "fig3c", "fig3d")

OPTIMIZE = "optimize"


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario input."""


@dataclass(frozen=True)
class Scenario:
    """One candidate run plus the benchmark it is compared against."""

    fiber: FiberParams
    launch: LaunchSpec
    candidate_spp: int
    candidate_dz_km: float
    filter_fraction: float | str = OPTIMIZE
    n_symbols: int = 256
    seeds: tuple[int, ...] = tuple(range(20))
    benchmark_spp: int = BENCHMARK_SPP
    benchmark_dz_km: float = BENCHMARK_DZ_KM
    optimize_fractions: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_symbols < 1:
            raise ScenarioError(f"n_symbols must be positive, got {self.n_symbols}")
        if not self.seeds:
            raise ScenarioError("seed list is empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ScenarioError("seed list contains duplicates")
        if self.candidate_spp > self.benchmark_spp:
            raise ScenarioError(
                f"candidate_spp {self.candidate_spp} exceeds benchmark_spp {self.benchmark_spp}"
            )
        if self.candidate_dz_km < self.benchmark_dz_km:
            raise ScenarioError(
                f"candidate_dz_km {self.candidate_dz_km} is finer than "
                f"benchmark_dz_km {self.benchmark_dz_km}"
            )
        if isinstance(self.filter_fraction, str):
            if self.filter_fraction != OPTIMIZE:
                raise ScenarioError(
                    f"filter_fraction must be a number in (0, 1] or '{OPTIMIZE}', "
                    f"got {self.filter_fraction!r}"
                )
        elif not 0.0 < self.filter_fraction <= 1.0:
            raise ScenarioError(
                f"filter_fraction must lie in (0, 1], got {self.filter_fraction}"
            )


@dataclass(frozen=True)
class SweepResult:
    """Seed-averaged NSD along one experiment axis, with and without filtering."""

    axis_name: str
    axis_values: tuple[float, ...]
    nsd_without_lpf: tuple[float, ...]
    nsd_with_lpf: tuple[float, ...]
    chosen_fractions: tuple[float, ...]


# --------------------------------------------------------------------------
# scenario files


_REQUIRED_KEYS = ("span_km", "power_dbm", "candidate_spp", "candidate_dz_km")
_OPTIONAL_KEYS = (
    "beta2_ps2_per_km",
    "gamma_per_w_km",
    "alpha_per_km",
    "rolloff",
    "baud_gbaud",
    "n_symbols",
    "seeds",
    "filter_fraction",
    "benchmark_spp",
    "benchmark_dz_km",
    "optimize_fractions",
)


def parse_seed_spec(text: str) -> tuple[int, ...]:
    """A bare integer means that many seeds (0..n-1); a comma list is literal."""
    text = text.strip()
    try:
        if "," in text:
            return tuple(int(part) for part in text.split(",") if part.strip())
        return tuple(range(int(text)))
    except ValueError as exc:
        raise ScenarioError(f"cannot parse seed spec {text!r}") from exc


def parse_fraction_spec(text: str) -> tuple[float, ...]:
    """Fraction grids are ``start:step:stop`` ranges or comma lists."""
    text = text.strip()
    try:
        if ":" in text:
            start, step, stop = (float(p) for p in text.split(":"))
            count = round((stop - start) / step)
            grid = tuple(round(start + i * step, 12) for i in range(count + 1))
            if not math.isclose(grid[-1], stop, rel_tol=1e-9):
                raise ScenarioError(f"step does not divide the range in {text!r}")
            return grid
        return tuple(float(p) for p in text.split(",") if p.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ScenarioError(f"cannot parse fraction grid {text!r}") from exc


def parse_scenario(text: str) -> Scenario:
    """Parse flat ``key = value`` scenario text."""
    entries: dict[str, str] = {}
    known = set(_REQUIRED_KEYS) | set(_OPTIONAL_KEYS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in known:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    for key in _REQUIRED_KEYS:
        if key not in entries:
            raise ScenarioError(f"missing required key {key!r}")

    def number(key: str, default: float | None = None) -> float:
        if key not in entries:
            return default  # type: ignore[return-value]
        try:
            return float(entries[key])
        except ValueError as exc:
            raise ScenarioError(f"key {key!r}: not a number: {entries[key]!r}") from exc

    def integer(key: str, default: int) -> int:
        value = number(key, float(default))
        if value != int(value):
            raise ScenarioError(f"key {key!r}: expected an integer, got {entries[key]!r}")
        return int(value)

    fraction: float | str = OPTIMIZE
    if "filter_fraction" in entries:
        raw_fraction = entries["filter_fraction"]
        fraction = raw_fraction if raw_fraction == OPTIMIZE else number("filter_fraction")
    fractions = None
    if "optimize_fractions" in entries:
        fractions = parse_fraction_spec(entries["optimize_fractions"])
    seeds = parse_seed_spec(entries["seeds"]) if "seeds" in entries else tuple(range(20))
    try:
        fiber = FiberParams(
            beta2=number("beta2_ps2_per_km", -21.7),
            gamma=number("gamma_per_w_km", 1.27),
            alpha=number("alpha_per_km", 0.0),
            span_km=number("span_km"),
        )
        launch = LaunchSpec(
            power_dbm=number("power_dbm"),
            rolloff=number("rolloff", 0.1),
            baud_rate=number("baud_gbaud", 10.0) * 1e9,
        )
        return Scenario(
            fiber=fiber,
            launch=launch,
            candidate_spp=integer("candidate_spp", 0),
            candidate_dz_km=number("candidate_dz_km"),
            filter_fraction=fraction,
            n_symbols=integer("n_symbols", 256),
            seeds=seeds,
            benchmark_spp=integer("benchmark_spp", BENCHMARK_SPP),
            benchmark_dz_km=number("benchmark_dz_km", BENCHMARK_DZ_KM),
            optimize_fractions=fractions,
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(str(exc)) from exc


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario(text)


# --------------------------------------------------------------------------
# running scenarios


def _fraction_grid(scenario: Scenario) -> tuple[float, ...]:
    if scenario.optimize_fractions is not None:
        return scenario.optimize_fractions
    return bandwidth.default_fractions()


def _warn_overflows(values: Sequence[float], what: str) -> None:
    n_bad = sum(1 for v in values if not math.isfinite(v))
    if n_bad:
        log.warning("%d of %d %s overflowed (reported as inf)", n_bad, len(values), what)


def run_scenario(
    scenario: Scenario, threads: int = 1
) -> tuple[NsdReport, bandwidth.BandwidthSweep | None]:
    """Evaluate one scenario against its benchmark.

    With a numeric ``filter_fraction`` the seed-averaged NSD at that fraction
    is returned and the second element is None.  With ``"optimize"`` the
    report carries the unfiltered (fraction 1.0) NSD and the full bandwidth
    sweep is returned alongside it.  Seeds that overflow enter the average
    as +inf and are counted in a logged warning.
    """
    grid_c = runner.candidate_grid(scenario)
    grid_b = runner.benchmark_grid(scenario)
    launch_fields = runner.shaped_fields(scenario)
    bench_fields = runner.benchmark_fields(scenario)
    if scenario.filter_fraction == OPTIMIZE:
        result = bandwidth.sweep_bandwidth(
            scenario,
            _fraction_grid(scenario),
            threads=threads,
            launch_fields=launch_fields,
            bench_fields=bench_fields,
        )
        _warn_overflows(result.nsd_values, "fractions")
        report = NsdReport(
            nsd=result.value_at(1.0),
            reference_grid=grid_b,
            candidate_grid=grid_c,
            comparison_grid=grid_b,
        )
        return report, result
    per_seed = runner.fraction_nsds(
        scenario, float(scenario.filter_fraction), launch_fields, bench_fields
    )
    _warn_overflows(per_seed, "seeds")
    report = NsdReport(
        nsd=float(np.mean(per_seed)),
        reference_grid=grid_b,
        candidate_grid=grid_c,
        comparison_grid=grid_b,
    )
    return report, None


def _substitute(base: Scenario, axis: str, value: float) -> Scenario:
    if axis == "distance":
        return dataclasses.replace(base, fiber=dataclasses.replace(base.fiber, span_km=value))
    if axis == "power":
        return dataclasses.replace(base, launch=dataclasses.replace(base.launch, power_dbm=value))
    if axis == "dt":
        if value != int(value):
            raise ScenarioError(f"dt axis values are samples per symbol, got {value}")
        return dataclasses.replace(base, candidate_spp=int(value))
    raise ScenarioError(f"unknown sweep axis {axis!r}")  # pragma: no cover


_AXIS_COLUMNS = {
    "distance": "distance_km",
    "power": "power_dbm",
    "dt": "dt_over_ts_percent",
    "bandwidth": "filter_fraction",
}


def sweep(axis: str, base: Scenario, values: Sequence[float], threads: int = 1) -> SweepResult:
    """Sweep one axis of a scenario and collect filtered/unfiltered NSD.

    Axis values are km for ``distance``, dBm for ``power``, integer samples
    per symbol for ``dt`` and filter fractions for ``bandwidth``.  Segment
    counts are recomputed per point from the fixed step sizes.  For the
    bandwidth axis a single benchmark set is shared by all points.
    """
    if axis not in AXES:
        raise ScenarioError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    column = _AXIS_COLUMNS[axis]
    if len(values) == 0:
        return SweepResult(column, (), (), (), ())

    if axis == "bandwidth":
        grid = tuple(sorted(set(float(v) for v in values) | {1.0}))
        result = bandwidth.sweep_bandwidth(base, grid, threads=threads)
        _warn_overflows(result.nsd_values, "fractions")
        reference = result.value_at(1.0)
        return SweepResult(
            axis_name=column,
            axis_values=tuple(float(v) for v in values),
            nsd_without_lpf=(reference,) * len(values),
            nsd_with_lpf=tuple(result.value_at(float(v)) for v in values),
            chosen_fractions=tuple(float(v) for v in values),
        )

    without: list[float] = []
    with_lpf: list[float] = []
    chosen: list[float] = []
    for value in values:
        point = _substitute(base, axis, float(value))
        if point.filter_fraction == OPTIMIZE:
            report, sweep_result = run_scenario(point, threads=threads)
            assert sweep_result is not None
            without.append(report.nsd)
            with_lpf.append(sweep_result.best_nsd)
            chosen.append(sweep_result.best_fraction)
        elif point.filter_fraction == 1.0:
            report, _ = run_scenario(point, threads=threads)
            without.append(report.nsd)
            with_lpf.append(report.nsd)
            chosen.append(1.0)
        else:
            fraction = float(point.filter_fraction)
            launch_fields = runner.shaped_fields(point)
            bench_fields = runner.benchmark_fields(point)
            at_fraction = runner.fraction_nsds(point, fraction, launch_fields, bench_fields)
            at_unity = runner.fraction_nsds(point, 1.0, launch_fields, bench_fields)
            _warn_overflows(tuple(at_fraction) + tuple(at_unity), "seeds")
            without.append(float(np.mean(at_unity)))
            with_lpf.append(float(np.mean(at_fraction)))
            chosen.append(fraction)

    if axis == "dt":
        axis_values = tuple(100.0 / float(v) for v in values)
    else:
        axis_values = tuple(float(v) for v in values)
    return SweepResult(column, axis_values, tuple(without), tuple(with_lpf), tuple(chosen))


# --------------------------------------------------------------------------
# CSV output


def _fmt(value: float) -> str:
    return format(value, ".12e")


def _fmt_axis(value: float) -> str:
    return format(value, ".12g")


def emit_csv(result: SweepResult, path: str) -> None:
    """Write a sweep as CSV: one header line, one row per axis value."""
    lines = [f"{result.axis_name},nsd_without_lpf,nsd_with_lpf,chosen_fraction"]
    rows = zip(
        result.axis_values,
        result.nsd_without_lpf,
        result.nsd_with_lpf,
        result.chosen_fractions,
    )
    for value, without, with_lpf, fraction in rows:
        lines.append(f"{_fmt_axis(value)},{_fmt(without)},{_fmt(with_lpf)},{_fmt_axis(fraction)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trace_csv(wave: Waveform, path: str) -> None:
    """Write a waveform as CSV columns (t_ps, re, im)."""
    lines = ["t_ps,re,im"]
    for t, sample in zip(wave.grid.times(), wave.samples):
        lines.append(f"{_fmt_axis(t)},{_fmt(sample.real)},{_fmt(sample.imag)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# presets


@dataclass(frozen=True)
class SweepJob:
    """One named sweep: a base scenario, an axis and the values to visit."""

    label: str
    axis: str
    values: tuple[float, ...]
    base: Scenario


def _fiber(span_km: float) -> FiberParams:
    return FiberParams(beta2=-21.7, gamma=1.27, alpha=0.0, span_km=span_km)


def _preset_scale(desk_scale: bool, desk_seeds: int) -> tuple[int, tuple[int, ...], tuple[float, ...]]:
    """(n_symbols, seeds, fraction grid) for full or desk scale."""
    if desk_scale:
        return 64, tuple(range(desk_seeds)), bandwidth.default_fractions(0.05)
    return 256, tuple(range(20)), bandwidth.default_fractions(0.01)


def preset_jobs(
    name: str, desk_scale: bool = False, seeds: tuple[int, ...] | None = None
) -> list[SweepJob]:
    """Sweep jobs for the named preset (``fig2`` has its own entry point)."""
    if name == "fig3a":
        n_symbols, default_seeds, fractions = _preset_scale(desk_scale, desk_seeds=10)
        base = Scenario(
            fiber=_fiber(1000.0),
            launch=LaunchSpec(power_dbm=10.0),
            candidate_spp=16,
            candidate_dz_km=0.1,
            filter_fraction=OPTIMIZE,
            n_symbols=n_symbols,
            seeds=seeds or default_seeds,
            optimize_fractions=fractions,
        )
        values = (200.0, 600.0, 1000.0) if desk_scale else tuple(float(z) for z in range(100, 1001, 100))
        return [SweepJob("fig3a", "distance", values, base)]
    if name == "fig3b":
        n_symbols, default_seeds, fractions = _preset_scale(desk_scale, desk_seeds=6)
        base = Scenario(
            fiber=_fiber(1000.0),
            launch=LaunchSpec(power_dbm=6.0),
            candidate_spp=8,
            candidate_dz_km=0.1,
            filter_fraction=OPTIMIZE,
            n_symbols=n_symbols,
            seeds=seeds or default_seeds,
            optimize_fractions=fractions,
        )
        if desk_scale:
            values = (5.4, 6.6, 7.8)
        else:
            values = tuple(round(5.4 + 0.3 * i, 12) for i in range(9))
        return [SweepJob("fig3b", "power", values, base)]
    if name == "fig3c":
        n_symbols, default_seeds, fractions = _preset_scale(desk_scale, desk_seeds=10)
        base = Scenario(
            fiber=_fiber(1000.0),
            launch=LaunchSpec(power_dbm=10.0),
            candidate_spp=16,
            candidate_dz_km=0.1,
            filter_fraction=OPTIMIZE,
            n_symbols=n_symbols,
            seeds=seeds or default_seeds,
            optimize_fractions=fractions,
        )
        values = (20.0, 16.0, 14.0) if desk_scale else (21.0, 20.0, 18.0, 16.0, 15.0, 14.0)
        return [SweepJob("fig3c", "dt", values, base)]
    if name == "fig3d":
        n_symbols, default_seeds, fractions = _preset_scale(desk_scale, desk_seeds=10)
        curves = [(16, 10.0), (8, 6.3)] if desk_scale else [(16, 10.0), (17, 10.0), (8, 6.3), (7, 6.3)]
        jobs = []
        for spp, power_dbm in curves:
            base = Scenario(
                fiber=_fiber(1000.0),
                launch=LaunchSpec(power_dbm=power_dbm),
                candidate_spp=spp,
                candidate_dz_km=0.1,
                filter_fraction=OPTIMIZE,
                n_symbols=n_symbols,
                seeds=seeds or default_seeds,
                optimize_fractions=fractions,
            )
            jobs.append(SweepJob(f"fig3d_spp{spp}_{power_dbm}dbm", "bandwidth", fractions, base))
        return jobs
    raise ScenarioError(f"unknown preset {name!r}; expected one of {PRESETS}")


FIG2_SPP = (30, 10, 8, 6, 4)


def reproduce_fig2(
    desk_scale: bool = False, seeds: tuple[int, ...] | None = None, threads: int = 1
) -> tuple[SweepResult, dict[str, Waveform]]:
    """Time-discretization study at 9.6 dBm over 600 km with 1.5 km steps.

    Returns the per-spp NSD summary (unfiltered vs bandwidth-optimized) and
    first-seed output traces: the benchmark plus an unfiltered and a filtered
    trace per spp value.
    """
    n_symbols, default_seeds, fractions = _preset_scale(desk_scale, desk_seeds=6)
    seeds = seeds or default_seeds
    fiber = _fiber(600.0)
    launch = LaunchSpec(power_dbm=9.6)

    def scenario_for(spp: int) -> Scenario:
        return Scenario(
            fiber=fiber,
            launch=launch,
            candidate_spp=spp,
            candidate_dz_km=1.5,
            filter_fraction=OPTIMIZE,
            n_symbols=n_symbols,
            seeds=seeds,
            optimize_fractions=fractions,
        )

    first = scenario_for(FIG2_SPP[0])
    bench_fields = runner.benchmark_fields(first)
    bench_grid = runner.benchmark_grid(first)
    traces: dict[str, Waveform] = {
        "benchmark": Waveform(samples=bench_fields[0], grid=bench_grid, z_km=fiber.span_km)
    }
    without: list[float] = []
    with_lpf: list[float] = []
    chosen: list[float] = []
    for spp in FIG2_SPP:
        scenario = scenario_for(spp)
        launch_fields = runner.shaped_fields(scenario)
        result = bandwidth.sweep_bandwidth(
            scenario,
            fractions,
            threads=threads,
            launch_fields=launch_fields,
            bench_fields=bench_fields,
        )
        _warn_overflows(result.nsd_values, "fractions")
        without.append(result.value_at(1.0))
        with_lpf.append(result.best_nsd)
        chosen.append(result.best_fraction)
        grid = runner.candidate_grid(scenario)
        seed0 = Waveform(samples=launch_fields[0], grid=grid, z_km=0.0)
        for suffix, fraction in (("unfiltered", 1.0), ("filtered", result.best_fraction)):
            cfg = SsfmConfig.from_step(fiber.span_km, 1.5, filter_fraction=fraction)
            traces[f"spp{spp}_{suffix}"] = propagate(seed0, fiber, cfg)
    summary = SweepResult(
        axis_name="samples_per_symbol",
        axis_values=tuple(float(s) for s in FIG2_SPP),
        nsd_without_lpf=tuple(without),
        nsd_with_lpf=tuple(with_lpf),
        chosen_fractions=tuple(chosen),
    )
    return summary, traces
