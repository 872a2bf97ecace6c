"""Run orchestration: config parsing, scenario runs, sweeps, presets.

A run wires the three stages together: waveform generation, batch metric
computation, and the per-sample decision loop. Trace and report files are
plain text (CSV and key = value) written deterministically, so identical
configs produce byte-identical outputs.

Config files are line-based `key = value` with [generator], [scenario],
[thresholds], [sogi] and [outputs] sections. Keys are unique across
sections, so bare keys without a section header are routed automatically;
multiple assignments may share one line separated by commas. Unknown keys
and malformed lines are reported with their line number.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .waveform import (
    FaultClass,
    FaultScenario,
    GeneratorConfig,
    WaveformTrace,
    generate,
)
from .monitor import (
    DEFAULT_EPS_AMP,
    DEFAULT_FC,
    DEFAULT_NOTCH_DAMPING,
    MetricsTrace,
    SogiParams,
    SQRT2,
    analyze,
    lowpass_gain,
)
from .detector import DetectionReport, FaultDetector, Thresholds


class ConfigError(ValueError):
    """Raised for malformed or unknown configuration input."""


# ---- Configuration ----


@dataclass(frozen=True)
class MonitorConfig:
    """Monitoring-stage tuning: tracker gain, smoothing, floors, settling."""

    k: float = SQRT2
    fc: float = DEFAULT_FC
    eps_amp: float = DEFAULT_EPS_AMP
    notch_damping: float = DEFAULT_NOTCH_DAMPING
    settle_cycles: float = 4.0   # startup mask length, fundamental cycles

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise ValueError(f"MonitorConfig.k must be > 0 (got {self.k})")
        if not self.fc > 0.0:
            raise ValueError(f"MonitorConfig.fc must be > 0 (got {self.fc})")
        if not self.eps_amp > 0.0:
            raise ValueError(
                f"MonitorConfig.eps_amp must be > 0 (got {self.eps_amp})"
            )
        if not self.notch_damping > 0.0:
            raise ValueError(
                f"MonitorConfig.notch_damping must be > 0 (got {self.notch_damping})"
            )
        if not self.settle_cycles >= 0.0:
            raise ValueError(
                f"MonitorConfig.settle_cycles must be >= 0 (got {self.settle_cycles})"
            )


@dataclass(frozen=True)
class RunConfig:
    """Everything one run needs, plus optional output paths."""

    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    scenario: FaultScenario = field(default_factory=FaultScenario)
    thresholds: Thresholds = field(default_factory=Thresholds)
    sogi: MonitorConfig = field(default_factory=MonitorConfig)
    trace_path: str | None = None
    report_path: str | None = None

    def __post_init__(self) -> None:
        # cross-section invariants, checked before any sample is produced
        lowpass_gain(self.sogi.fc, self.generator.fs)
        if not self.sogi.notch_damping <= self.sogi.k:
            raise ValueError(
                "MonitorConfig.notch_damping must be <= k "
                f"(got {self.sogi.notch_damping} > {self.sogi.k})"
            )
        if (
            self.scenario.fault is not FaultClass.NO_FAULT
            and not self.scenario.t_fault < self.generator.duration
        ):
            raise ValueError(
                "FaultScenario.t_fault must lie inside the run "
                f"(t_fault={self.scenario.t_fault}, duration={self.generator.duration})"
            )

    def sogi_params(self) -> SogiParams:
        g = self.generator
        return SogiParams(k=self.sogi.k, omega0=2.0 * math.pi * g.f0, fs=g.fs)

    def settle_until(self) -> float:
        return self.sogi.settle_cycles / self.generator.f0


# ---- Config text format ----

_SECTION_FIELDS: dict[str, dict[str, tuple[str, object]]] = {
    "generator": {
        "f0": ("f0", float),
        "fs": ("fs", float),
        "amplitude": ("amplitude", float),
        "duration": ("duration", float),
        "onset_angle": ("onset_angle", float),
    },
    "scenario": {
        "fault": ("fault", FaultClass.parse),
        "t_fault": ("t_fault", float),
        "rho": ("rho", float),
    },
    "thresholds": {
        "alpha": ("alpha", float),
        "delta_v": ("delta_v", float),
        "eps_v0": ("eps_v0", float),
        "pp_amp_ceiling": ("pp_amp_ceiling", float),
        "debounce": ("debounce", int),
    },
    "sogi": {
        "k": ("k", float),
        "fc": ("fc", float),
        "eps_amp": ("eps_amp", float),
        "notch_damping": ("notch_damping", float),
        "settle_cycles": ("settle_cycles", float),
    },
    "outputs": {
        "trace": ("trace", str),
        "report": ("report", str),
    },
}

# every key is unique across sections, so bare keys can be routed
_KEY_SECTION = {
    key: section for section, keys in _SECTION_FIELDS.items() for key in keys
}
assert len(_KEY_SECTION) == sum(len(k) for k in _SECTION_FIELDS.values())


def parse_config(text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse config text into a RunConfig, applying defaults for absent keys.

    overrides maps bare key names to raw string values and is applied after
    the file content (used for CLI flag overrides).
    """
    raw: dict[str, dict[str, object]] = {s: {} for s in _SECTION_FIELDS}
    section: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip().lower()
            if name not in _SECTION_FIELDS:
                raise ConfigError(f"line {lineno}: unknown section [{name}]")
            section = name
            continue
        # allow several assignments per line, comma separated
        chunks = [stripped]
        if "," in stripped:
            parts = [c.strip() for c in stripped.split(",")]
            if all("=" in c for c in parts):
                chunks = parts
        for chunk in chunks:
            if "=" not in chunk:
                raise ConfigError(f"line {lineno}: expected key = value, got {chunk!r}")
            key, _, value = chunk.partition("=")
            key = key.strip().lower()
            value = value.strip()
            target = section
            if target is None or key not in _SECTION_FIELDS[target]:
                target = _KEY_SECTION.get(key)
            if target is None:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key not in _SECTION_FIELDS[target]:
                raise ConfigError(
                    f"line {lineno}: unknown key {key!r} in section [{section}]"
                )
            _, cast = _SECTION_FIELDS[target][key]
            try:
                raw[target][key] = cast(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if overrides:
        for key, value in overrides.items():
            key = key.lower()
            target = _KEY_SECTION.get(key)
            if target is None:
                raise ConfigError(f"unknown override key {key!r}")
            _, cast = _SECTION_FIELDS[target][key]
            try:
                raw[target][key] = cast(value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    try:
        return RunConfig(
            generator=GeneratorConfig(**raw["generator"]),
            scenario=FaultScenario(**raw["scenario"]),
            thresholds=Thresholds(**raw["thresholds"]),
            sogi=MonitorConfig(**raw["sogi"]),
            trace_path=raw["outputs"].get("trace"),  # type: ignore[arg-type]
            report_path=raw["outputs"].get("report"),  # type: ignore[arg-type]
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def format_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig to config text; parse_config inverts exactly."""
    g, s, th, m = cfg.generator, cfg.scenario, cfg.thresholds, cfg.sogi
    lines = [
        "[generator]",
        f"f0 = {g.f0!r}",
        f"fs = {g.fs!r}",
        f"amplitude = {g.amplitude!r}",
        f"duration = {g.duration!r}",
        f"onset_angle = {g.onset_angle!r}",
        "",
        "[scenario]",
        f"fault = {s.fault.name}",
        f"t_fault = {s.t_fault!r}",
        f"rho = {s.rho!r}",
        "",
        "[thresholds]",
        f"alpha = {th.alpha!r}",
        f"delta_v = {th.delta_v!r}",
        f"eps_v0 = {th.eps_v0!r}",
        f"pp_amp_ceiling = {th.pp_amp_ceiling!r}",
        f"debounce = {th.debounce!r}",
        "",
        "[sogi]",
        f"k = {m.k!r}",
        f"fc = {m.fc!r}",
        f"eps_amp = {m.eps_amp!r}",
        f"notch_damping = {m.notch_damping!r}",
        f"settle_cycles = {m.settle_cycles!r}",
    ]
    if cfg.trace_path is not None or cfg.report_path is not None:
        lines.append("")
        lines.append("[outputs]")
        if cfg.trace_path is not None:
            lines.append(f"trace = {cfg.trace_path}")
        if cfg.report_path is not None:
            lines.append(f"report = {cfg.report_path}")
    return "\n".join(lines) + "\n"


# ---- Single run ----


@dataclass(frozen=True)
class SimulationResult:
    """Full in-memory outcome of one run."""

    wave: WaveformTrace
    metrics: MetricsTrace
    codes: np.ndarray          # detector output code at every sample
    report: DetectionReport


def simulate(cfg: RunConfig) -> SimulationResult:
    """Generate, monitor and detect one scenario; no file output."""
    wave = generate(cfg.generator, cfg.scenario)
    m = cfg.sogi
    metrics = analyze(
        wave.va,
        wave.vb,
        wave.vc,
        cfg.sogi_params(),
        fc=m.fc,
        eps_amp=m.eps_amp,
        notch_damping=m.notch_damping,
    )
    det = FaultDetector(
        cfg.thresholds,
        fs=cfg.generator.fs,
        f0=cfg.generator.f0,
        settle_until=cfg.settle_until(),
    )
    ts = wave.t.tolist()
    aa, ab, ac = (metrics.amp[:, p].tolist() for p in range(3))
    ta, tb, tc = (metrics.thd[:, p].tolist() for p in range(3))
    vm = metrics.v0_mag.tolist()
    upd = det.update_values
    for i in range(len(ts)):
        upd(ts[i], aa[i], ab[i], ac[i], ta[i], tb[i], tc[i], vm[i])
    report = det.finalize(cfg.scenario)
    codes = np.zeros(len(ts), dtype=np.int64)
    for idx, code in det.code_changes():
        codes[idx:] = int(code)
    return SimulationResult(wave=wave, metrics=metrics, codes=codes, report=report)


_TRACE_COLUMNS = (
    "t",
    "va",
    "vb",
    "vc",
    "amp_a",
    "amp_b",
    "amp_c",
    "thd_a",
    "thd_b",
    "thd_c",
    "v0_inst",
    "v0_mag",
    "code",
)


def format_trace(result: SimulationResult) -> str:
    """CSV text of the full run, fixed column order, repr float formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_TRACE_COLUMNS)
    w, mt = result.wave, result.metrics
    cols = [
        w.t,
        w.va,
        w.vb,
        w.vc,
        mt.amp[:, 0],
        mt.amp[:, 1],
        mt.amp[:, 2],
        mt.thd[:, 0],
        mt.thd[:, 1],
        mt.thd[:, 2],
        mt.v0,
        mt.v0_mag,
    ]
    lists = [c.tolist() for c in cols] + [result.codes.tolist()]
    for row in zip(*lists):
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _fmt(value: float | None) -> str:
    return "none" if value is None else repr(value)


def format_report(report: DetectionReport) -> str:
    """Flat key = value text plus a one-line machine-readable summary."""
    lines = [
        f"code = {int(report.code)}",
        f"code_name = {report.code.name}",
        f"t_detect = {_fmt(report.t_detect)}",
        f"t_identify = {_fmt(report.t_identify)}",
        f"latency = {_fmt(report.latency)}",
    ]
    for i, name in enumerate(("a", "b", "c")):
        lines.append(f"peak_thd_{name} = {report.peak_thd[i]!r}")
    for i, name in enumerate(("a", "b", "c")):
        lines.append(f"min_amp_{name} = {report.min_amp[i]!r}")
    lines.append(f"peak_v0 = {report.peak_v0!r}")
    for i, name in enumerate(("a", "b", "c")):
        lines.append(f"settled_amp_{name} = {report.settled_amp[i]!r}")
    lines.append(f"settled_v0 = {report.settled_v0!r}")
    lines.append(f"thd_only_alarm = {str(report.thd_only_alarm).lower()}")
    lines.append(f"t_thd_alarm = {_fmt(report.t_thd_alarm)}")
    summary = (
        f"summary = code={int(report.code)} name={report.code.name}"
        f" t_detect={_fmt(report.t_detect)} t_identify={_fmt(report.t_identify)}"
        f" latency={_fmt(report.latency)} peak_v0={report.peak_v0!r}"
    )
    lines.append(summary)
    return "\n".join(lines) + "\n"


def run_scenario(cfg: RunConfig) -> DetectionReport:
    """Run one scenario, writing trace/report files when paths are set."""
    result = simulate(cfg)
    if cfg.trace_path is not None:
        with open(cfg.trace_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_trace(result))
    if cfg.report_path is not None:
        with open(cfg.report_path, "w", encoding="utf-8") as fh:
            fh.write(format_report(result.report))
    return result.report


# ---- Sweeps ----

DEFAULT_SWEEP_FAULTS = tuple(FaultClass(c) for c in range(1, 11))
DEFAULT_SWEEP_ANGLES = tuple(float(a) for a in range(0, 360, 10))
DEFAULT_SWEEP_RHOS = (0.0,)


@dataclass(frozen=True)
class SweepSpec:
    """Grid of scenarios to run against one base configuration."""

    faults: tuple[FaultClass, ...] = DEFAULT_SWEEP_FAULTS
    angles_deg: tuple[float, ...] = DEFAULT_SWEEP_ANGLES
    rhos: tuple[float, ...] = DEFAULT_SWEEP_RHOS
    base: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self) -> None:
        if not self.faults:
            raise ValueError("SweepSpec.faults must be non-empty")
        if not self.angles_deg:
            raise ValueError("SweepSpec.angles_deg must be non-empty")
        if not self.rhos:
            raise ValueError("SweepSpec.rhos must be non-empty")

    def __len__(self) -> int:
        return len(self.faults) * len(self.angles_deg) * len(self.rhos)


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one sweep cell."""

    fault: FaultClass           # injected (expected) class
    angle_deg: float
    rho: float
    observed: FaultClass | None
    ok: bool
    t_detect: float | None
    t_identify: float | None
    latency: float | None
    peak_thd: tuple[float, float, float]
    min_amp: tuple[float, float, float]
    settled_amp: tuple[float, float, float]
    peak_v0: float
    settled_v0: float
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    misclassified: int
    errors: int
    worst_latency: float | None

    def format_summary(self) -> str:
        worst = "none" if self.worst_latency is None else repr(self.worst_latency)
        return (
            f"runs = {len(self.rows)}\n"
            f"misclassified = {self.misclassified}\n"
            f"errors = {self.errors}\n"
            f"worst_latency = {worst}\n"
        )


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run every (fault, angle, rho) cell; individual failures become rows."""
    rows: list[SweepRow] = []
    misclassified = 0
    failures = 0
    worst: float | None = None
    for fault in spec.faults:
        for angle in spec.angles_deg:
            for rho in spec.rhos:
                try:
                    gen = dataclasses.replace(
                        spec.base.generator, onset_angle=math.radians(angle)
                    )
                    scn = dataclasses.replace(
                        spec.base.scenario, fault=fault, rho=rho
                    )
                    cfg = dataclasses.replace(
                        spec.base,
                        generator=gen,
                        scenario=scn,
                        trace_path=None,
                        report_path=None,
                    )
                    rep = simulate(cfg).report
                except Exception as exc:  # keep sweeping, record the failure
                    failures += 1
                    rows.append(
                        SweepRow(
                            fault=fault,
                            angle_deg=angle,
                            rho=rho,
                            observed=None,
                            ok=False,
                            t_detect=None,
                            t_identify=None,
                            latency=None,
                            peak_thd=(math.nan,) * 3,
                            min_amp=(math.nan,) * 3,
                            settled_amp=(math.nan,) * 3,
                            peak_v0=math.nan,
                            settled_v0=math.nan,
                            error=f"{type(exc).__name__}: {exc}",
                        )
                    )
                    continue
                ok = rep.code is fault
                if not ok:
                    misclassified += 1
                if rep.latency is not None and (worst is None or rep.latency > worst):
                    worst = rep.latency
                rows.append(
                    SweepRow(
                        fault=fault,
                        angle_deg=angle,
                        rho=rho,
                        observed=rep.code,
                        ok=ok,
                        t_detect=rep.t_detect,
                        t_identify=rep.t_identify,
                        latency=rep.latency,
                        peak_thd=rep.peak_thd,
                        min_amp=rep.min_amp,
                        settled_amp=rep.settled_amp,
                        peak_v0=rep.peak_v0,
                        settled_v0=rep.settled_v0,
                    )
                )
    return SweepResult(
        rows=tuple(rows),
        misclassified=misclassified,
        errors=failures,
        worst_latency=worst,
    )


_SWEEP_COLUMNS = (
    "fault",
    "angle_deg",
    "rho",
    "expected_code",
    "observed_code",
    "ok",
    "t_detect",
    "t_identify",
    "latency",
    "peak_thd_a",
    "peak_thd_b",
    "peak_thd_c",
    "min_amp_a",
    "min_amp_b",
    "min_amp_c",
    "settled_amp_a",
    "settled_amp_b",
    "settled_amp_c",
    "peak_v0",
    "settled_v0",
    "error",
)


def format_sweep(result: SweepResult) -> str:
    """CSV text with one row per sweep cell."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SWEEP_COLUMNS)
    for r in result.rows:
        writer.writerow(
            [
                r.fault.name,
                repr(r.angle_deg),
                repr(r.rho),
                int(r.fault),
                "" if r.observed is None else int(r.observed),
                int(r.ok),
                _fmt_cell(r.t_detect),
                _fmt_cell(r.t_identify),
                _fmt_cell(r.latency),
                *[repr(x) for x in r.peak_thd],
                *[repr(x) for x in r.min_amp],
                *[repr(x) for x in r.settled_amp],
                repr(r.peak_v0),
                repr(r.settled_v0),
                r.error or "",
            ]
        )
    return buf.getvalue()


def _fmt_cell(value: float | None) -> str:
    return "" if value is None else repr(value)


# ---- Presets ----

_PRESETS = {
    # bolted three-phase fault, mid-run onset
    "fig4": FaultScenario(FaultClass.THREE_PHASE, 0.2, 0.0),
    # bolted phase-to-phase fault between b and c, mid-run onset
    "fig6": FaultScenario(FaultClass.BC, 0.2, 0.0),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_config(name: str) -> RunConfig:
    """Named ready-to-run configurations for the two bundled showcases."""
    try:
        scn = _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        ) from None
    return RunConfig(generator=GeneratorConfig(duration=0.4), scenario=scn)
