"""Command-line front end.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
overflow left no finite result, 4 output I/O failure.  Unreadable scenario
files count as invalid configuration.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from typing import Sequence

from . import harness
from .engine import NumericalOverflowError, SsfmConfig, propagate
from .harness import OPTIMIZE, Scenario, ScenarioError
from .metrics import nsd
from .runner import candidate_grid
from .signals import Waveform, gen_symbols, shape_pulse

__all__ = ["main", "entry"]


def _add_common(parser: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        parser.add_argument("--config", required=True, help="scenario file (key = value lines)")
    parser.add_argument("--seeds", help="seed count, or comma-separated seed list")
    parser.add_argument("--out", help="output path (or path prefix for multi-file commands)")
    parser.add_argument(
        "--desk-scale",
        action="store_true",
        help="shrink presets (fewer symbols, seeds and axis points) for quick runs",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=0,
        metavar="N",
        help="worker threads for bandwidth searches; 0 = auto (default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssfmlab",
        description="Split-step fiber simulator with low-pass-filtered linear steps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="run one scenario seed and dump the output trace")
    _add_common(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("nsd", help="NSD between the outputs of two run specs")
    p.add_argument("reference", help="scenario file for the reference run")
    p.add_argument("candidate", help="scenario file for the candidate run")
    _add_common(p, config=False)
    p.set_defaults(func=cmd_nsd)

    p = sub.add_parser("sweep", help="sweep one axis of a scenario")
    p.add_argument("--axis", required=True, choices=harness.AXES)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize-bandwidth", help="grid-search the filter bandwidth")
    p.add_argument("--fractions", help="fraction grid as start:step:stop or comma list")
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("reproduce", help="run a named preset experiment")
    p.add_argument("preset", choices=harness.PRESETS)
    _add_common(p, config=False)
    p.set_defaults(func=cmd_reproduce)

    return parser


def _apply_overrides(scenario: Scenario, args: argparse.Namespace) -> Scenario:
    import dataclasses

    if args.seeds:
        scenario = dataclasses.replace(scenario, seeds=harness.parse_seed_spec(args.seeds))
    return scenario


def _require_numeric_fraction(scenario: Scenario, command: str) -> float:
    if scenario.filter_fraction == OPTIMIZE:
        raise ScenarioError(
            f"'{command}' needs a numeric filter_fraction; 'optimize' is only "
            f"meaningful for sweeps and bandwidth searches"
        )
    return float(scenario.filter_fraction)


def _single_run(scenario: Scenario, seed: int) -> Waveform:
    fraction = _require_numeric_fraction(scenario, "this command")
    grid = candidate_grid(scenario)
    wave = shape_pulse(gen_symbols(seed, scenario.n_symbols), grid, scenario.launch)
    cfg = SsfmConfig.from_step(scenario.fiber.span_km, scenario.candidate_dz_km, fraction)
    return propagate(wave, scenario.fiber, cfg)


def cmd_propagate(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(harness.load_scenario(args.config), args)
    out = args.out or "propagate.csv"
    wave = _single_run(scenario, scenario.seeds[0])
    harness.write_trace_csv(wave, out)
    print(f"wrote {out}")
    return 0


def cmd_nsd(args: argparse.Namespace) -> int:
    reference = _apply_overrides(harness.load_scenario(args.reference), args)
    candidate = _apply_overrides(harness.load_scenario(args.candidate), args)
    for field in ("n_symbols",):
        if getattr(reference, field) != getattr(candidate, field):
            raise ScenarioError(f"run specs disagree on {field}")
    if reference.launch.baud_rate != candidate.launch.baud_rate:
        raise ScenarioError("run specs disagree on baud rate")
    if reference.fiber.span_km != candidate.fiber.span_km:
        raise ScenarioError("run specs disagree on span_km")
    _require_numeric_fraction(reference, "nsd")
    _require_numeric_fraction(candidate, "nsd")
    values = []
    for seed in reference.seeds:
        try:
            ref_wave = _single_run(reference, seed)
            cand_wave = _single_run(candidate, seed)
            values.append(nsd(ref_wave, cand_wave).nsd)
        except NumericalOverflowError:
            values.append(math.inf)
    mean = sum(values) / len(values)
    print(f"nsd = {harness._fmt(mean)} over {len(values)} seed(s)")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("nsd\n" + harness._fmt(mean) + "\n")
    return 3 if not math.isfinite(mean) else 0


def _parse_values(text: str, axis: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ScenarioError(f"cannot parse --values for axis {axis}: {text!r}") from exc


def _all_overflowed(result: harness.SweepResult) -> bool:
    values = result.nsd_without_lpf + result.nsd_with_lpf
    return bool(values) and not any(math.isfinite(v) for v in values)


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(harness.load_scenario(args.config), args)
    values = _parse_values(args.values, args.axis)
    result = harness.sweep(args.axis, scenario, values, threads=args.threads)
    out = args.out or f"sweep_{args.axis}.csv"
    harness.emit_csv(result, out)
    print(f"wrote {out}")
    return 3 if _all_overflowed(result) else 0


def cmd_optimize(args: argparse.Namespace) -> int:
    scenario = _apply_overrides(harness.load_scenario(args.config), args)
    if args.fractions:
        fractions = harness.parse_fraction_spec(args.fractions)
    elif scenario.optimize_fractions is not None:
        fractions = scenario.optimize_fractions
    else:
        from .bandwidth import default_fractions

        fractions = default_fractions()
    from .bandwidth import sweep_bandwidth

    result = sweep_bandwidth(scenario, fractions, threads=args.threads)
    print(
        f"best filter_fraction = {harness._fmt_axis(result.best_fraction)} "
        f"with nsd = {harness._fmt(result.best_nsd)} "
        f"(unfiltered nsd = {harness._fmt(result.value_at(1.0))})"
    )
    if args.out:
        table = harness.SweepResult(
            axis_name="filter_fraction",
            axis_values=result.fractions,
            nsd_without_lpf=(result.value_at(1.0),) * len(result.fractions),
            nsd_with_lpf=result.nsd_values,
            chosen_fractions=result.fractions,
        )
        harness.emit_csv(table, args.out)
        print(f"wrote {args.out}")
    return 3 if not any(math.isfinite(v) for v in result.nsd_values) else 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    seeds = harness.parse_seed_spec(args.seeds) if args.seeds else None
    prefix = args.out or args.preset
    written: list[str] = []
    all_values: list[float] = []
    if args.preset == "fig2":
        summary, traces = harness.reproduce_fig2(
            desk_scale=args.desk_scale, seeds=seeds, threads=args.threads
        )
        out = prefix if prefix.endswith(".csv") else f"{prefix}_summary.csv"
        stem = out[: -len("_summary.csv")] if out.endswith("_summary.csv") else out[: -len(".csv")]
        harness.emit_csv(summary, out)
        written.append(out)
        for label, wave in traces.items():
            trace_path = f"{stem}_trace_{label}.csv"
            harness.write_trace_csv(wave, trace_path)
            written.append(trace_path)
        all_values = list(summary.nsd_without_lpf + summary.nsd_with_lpf)
    else:
        jobs = harness.preset_jobs(args.preset, desk_scale=args.desk_scale, seeds=seeds)
        for job in jobs:
            result = harness.sweep(job.axis, job.base, job.values, threads=args.threads)
            if len(jobs) == 1:
                out = prefix if prefix.endswith(".csv") else f"{prefix}.csv"
            else:
                base = prefix[: -len(".csv")] if prefix.endswith(".csv") else prefix
                out = f"{base}_{job.label}.csv"
            harness.emit_csv(result, out)
            written.append(out)
            all_values.extend(result.nsd_without_lpf + result.nsd_with_lpf)
    for path in written:
        print(f"wrote {path}")
    if all_values and not any(math.isfinite(v) for v in all_values):
        return 3
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalOverflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:  # pragma: no cover - console script shim
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
