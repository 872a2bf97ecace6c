"""Distortion-based fault detection for three-phase microgrid voltages.

The package splits into four layers:

    waveform   synthetic three-phase templates with fault injection
    monitor    per-phase amplitude/distortion tracking and zero sequence
    detector   debounced threshold logic mapping metrics to a fault code
    harness    configs, single runs, sweeps, presets, CSV/report output
"""

from .waveform import (
    FaultClass,
    FaultScenario,
    GeneratorConfig,
    PHASE_NAMES,
    ThreePhaseSample,
    WaveformTrace,
    faulted_sample,
    faulted_values,
    generate,
    prefault_sample,
    prefault_values,
    sample_count,
)
from .monitor import (
    Biquad,
    LowPass,
    MetricsTrace,
    PhaseMetrics,
    PhaseMonitor,
    Sogi,
    SogiParams,
    ThdEstimator,
    ThreePhaseMonitor,
    ZeroSequenceMonitor,
    analyze,
    lowpass_gain,
    notch_sharpen_coefficients,
    sogi_coefficients,
    zero_sequence,
)
from .detector import (
    DetectionReport,
    FaultDetector,
    Thresholds,
    classify,
)
from .harness import (
    ConfigError,
    MonitorConfig,
    PRESET_NAMES,
    RunConfig,
    SimulationResult,
    SweepResult,
    SweepRow,
    SweepSpec,
    format_config,
    format_report,
    format_sweep,
    format_trace,
    parse_config,
    preset_config,
    run_scenario,
    run_sweep,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "Biquad",
    "ConfigError",
    "DetectionReport",
    "FaultClass",
    "FaultDetector",
    "FaultScenario",
    "GeneratorConfig",
    "LowPass",
    "MetricsTrace",
    "MonitorConfig",
    "PHASE_NAMES",
    "PRESET_NAMES",
    "PhaseMetrics",
    "PhaseMonitor",
    "RunConfig",
    "SimulationResult",
    "Sogi",
    "SogiParams",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "ThdEstimator",
    "ThreePhaseMonitor",
    "ThreePhaseSample",
    "Thresholds",
    "WaveformTrace",
    "ZeroSequenceMonitor",
    "analyze",
    "classify",
    "faulted_sample",
    "faulted_values",
    "format_config",
    "format_report",
    "format_sweep",
    "format_trace",
    "generate",
    "lowpass_gain",
    "notch_sharpen_coefficients",
    "parse_config",
    "prefault_sample",
    "prefault_values",
    "preset_config",
    "run_scenario",
    "run_sweep",
    "sample_count",
    "simulate",
    "sogi_coefficients",
    "zero_sequence",
    "__version__",
]
