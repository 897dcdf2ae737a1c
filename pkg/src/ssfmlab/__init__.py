"""Split-step fiber channel simulation with low-pass-filtered linear steps.

The package propagates 16-QAM test signals through a scalar nonlinear
Schrodinger channel, measures accuracy against fine-grid benchmark runs via
a normalized square difference, and searches for the filter bandwidth that
minimizes that error.  ``ssfmlab.cli`` exposes the experiment harness.
"""

from .bandwidth import BandwidthSweep, default_fractions, sweep_bandwidth
from .engine import (
    BENCHMARK_DZ_KM,
    BENCHMARK_SPP,
    FiberParams,
    LinearMultiplier,
    NumericalOverflowError,
    SsfmConfig,
    benchmark_output,
    linear_multiplier,
    nonlinear_step,
    propagate,
)
from .harness import (
    AXES,
    PRESETS,
    Scenario,
    ScenarioError,
    SweepResult,
    emit_csv,
    load_scenario,
    parse_scenario,
    preset_jobs,
    reproduce_fig2,
    run_scenario,
    sweep,
    write_trace_csv,
)
from .metrics import DegenerateInputError, NsdReport, nsd
from .signals import (
    QAM16,
    LaunchSpec,
    SamplingGrid,
    SymbolSequence,
    Waveform,
    dbm_to_watts,
    gen_symbols,
    make_grid,
    resample_bandlimited,
    shape_pulse,
)

__version__ = "0.1.0"

__all__ = [
    "AXES",
    "BENCHMARK_DZ_KM",
    "BENCHMARK_SPP",
    "BandwidthSweep",
    "DegenerateInputError",
    "FiberParams",
    "LaunchSpec",
    "LinearMultiplier",
    "NsdReport",
    "NumericalOverflowError",
    "PRESETS",
    "QAM16",
    "SamplingGrid",
    "Scenario",
    "ScenarioError",
    "SsfmConfig",
    "SweepResult",
    "SymbolSequence",
    "Waveform",
    "benchmark_output",
    "dbm_to_watts",
    "default_fractions",
    "emit_csv",
    "gen_symbols",
    "linear_multiplier",
    "load_scenario",
    "make_grid",
    "nonlinear_step",
    "nsd",
    "parse_scenario",
    "preset_jobs",
    "propagate",
    "reproduce_fig2",
    "resample_bandlimited",
    "run_scenario",
    "shape_pulse",
    "sweep",
    "sweep_bandwidth",
    "write_trace_csv",
    "__version__",
]
