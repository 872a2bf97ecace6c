"""Idealized three-phase voltage templates with switchable fault injection.

Faults are modeled as instantaneous template changes at the relay measurement
point: grounded phases collapse toward zero by a residual factor, and a
phase-to-phase short pins both conductors to their common midpoint voltage.
This is deliberately not a circuit solver; it produces the canonical per-unit
signatures (amplitude steps, zero-sequence content) that the monitoring stack
consumes, with exact control over onset time and onset angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator

import numpy as np

TWO_PI = 2.0 * math.pi

# phase b lags a by 120 degrees, phase c leads by 120 degrees
_PHASE_OFFSETS = (0.0, -TWO_PI / 3.0, TWO_PI / 3.0)

PHASE_NAMES = ("a", "b", "c")


class FaultClass(IntEnum):
    """Relay output codes, one per fault category.

    0 is the healthy state. 1..3 are single-phase-to-ground, 4..6 are
    phase-to-phase, 7..9 are double-phase-to-ground, 10 covers the
    three-phase fault (grounded or not; both collapse all three phases).
    """

    NO_FAULT = 0
    AG = 1
    BG = 2
    CG = 3
    AB = 4
    BC = 5
    CA = 6
    ABG = 7
    BCG = 8
    CAG = 9
    THREE_PHASE = 10

    @property
    def phases(self) -> frozenset[int]:
        """Indices (0=a, 1=b, 2=c) of the conductors involved in the fault."""
        return _FAULT_PHASES[self]

    @property
    def grounded(self) -> bool:
        """True when the fault path includes ground (voltages collapse to zero)."""
        return self in _GROUNDED

    @property
    def pair_to_pair(self) -> bool:
        """True for the ungrounded phase-to-phase faults (AB, BC, CA)."""
        return self in (FaultClass.AB, FaultClass.BC, FaultClass.CA)

    @classmethod
    def parse(cls, text: str | int) -> "FaultClass":
        """Accept an enum name, a code number, or a common alias like 3PH."""
        if isinstance(text, int):
            return cls(text)
        key = text.strip().upper().replace("-", "_")
        aliases = {
            "NONE": cls.NO_FAULT,
            "NOFAULT": cls.NO_FAULT,
            "3PH": cls.THREE_PHASE,
            "3PHG": cls.THREE_PHASE,
            "3PH_G": cls.THREE_PHASE,
            "ABC": cls.THREE_PHASE,
            "ABCG": cls.THREE_PHASE,
            "THREEPHASE": cls.THREE_PHASE,
        }
        if key in aliases:
            return aliases[key]
        try:
            return cls[key]
        except KeyError:
            pass
        try:
            return cls(int(key))
        except ValueError:
            raise ValueError(f"unknown fault class {text!r}") from None


_FAULT_PHASES = {
    FaultClass.NO_FAULT: frozenset(),
    FaultClass.AG: frozenset({0}),
    FaultClass.BG: frozenset({1}),
    FaultClass.CG: frozenset({2}),
    FaultClass.AB: frozenset({0, 1}),
    FaultClass.BC: frozenset({1, 2}),
    FaultClass.CA: frozenset({2, 0}),
    FaultClass.ABG: frozenset({0, 1}),
    FaultClass.BCG: frozenset({1, 2}),
    FaultClass.CAG: frozenset({2, 0}),
    FaultClass.THREE_PHASE: frozenset({0, 1, 2}),
}

_GROUNDED = frozenset(
    {
        FaultClass.AG,
        FaultClass.BG,
        FaultClass.CG,
        FaultClass.ABG,
        FaultClass.BCG,
        FaultClass.CAG,
        FaultClass.THREE_PHASE,
    }
)


# ---- Configuration ----


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the balanced pre-fault system and the sampling grid."""

    f0: float = 50.0          # fundamental frequency, Hz
    fs: float = 10_000.0      # sample rate, Hz; must give >= 20 samples per cycle
    amplitude: float = 1.0    # pre-fault phase amplitude, pu
    duration: float = 0.4     # run length, s
    onset_angle: float = 0.0  # phase a angle at t = 0, rad

    def __post_init__(self) -> None:
        if not self.f0 > 0.0:
            raise ValueError(f"GeneratorConfig.f0 must be > 0 (got {self.f0})")
        if not self.fs >= 20.0 * self.f0:
            raise ValueError(
                f"GeneratorConfig.fs must be >= 20*f0 = {20.0 * self.f0} (got {self.fs})"
            )
        if not self.amplitude > 0.0:
            raise ValueError(
                f"GeneratorConfig.amplitude must be > 0 (got {self.amplitude})"
            )
        if not self.duration > 0.0:
            raise ValueError(
                f"GeneratorConfig.duration must be > 0 (got {self.duration})"
            )
        if not math.isfinite(self.onset_angle):
            raise ValueError("GeneratorConfig.onset_angle must be finite")


@dataclass(frozen=True)
class FaultScenario:
    """What to inject and when.

    rho is the residual voltage fraction retained by the faulted phases:
    0 is a bolted fault, values approaching 1 leave the waveform nearly
    untouched (and below the relay's amplitude threshold by design).
    t_fault is ignored for NO_FAULT scenarios.
    """

    fault: FaultClass = FaultClass.NO_FAULT
    t_fault: float = 0.2  # onset instant, s
    rho: float = 0.0      # residual voltage fraction, 0 <= rho < 1

    def __post_init__(self) -> None:
        if not isinstance(self.fault, FaultClass):
            object.__setattr__(self, "fault", FaultClass.parse(self.fault))
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"FaultScenario.rho must be in [0, 1) (got {self.rho})")
        if self.fault is not FaultClass.NO_FAULT and not self.t_fault >= 0.0:
            raise ValueError(
                f"FaultScenario.t_fault must be >= 0 (got {self.t_fault})"
            )


@dataclass(frozen=True)
class ThreePhaseSample:
    """One instant of the three phase voltages."""

    t: float
    va: float
    vb: float
    vc: float

    def values(self) -> tuple[float, float, float]:
        return (self.va, self.vb, self.vc)


# ---- Sample-level templates ----


def prefault_values(cfg: GeneratorConfig, t: float) -> tuple[float, float, float]:
    """Balanced positive-sequence triple at time t."""
    arg = TWO_PI * cfg.f0 * t + cfg.onset_angle
    a = cfg.amplitude
    return (
        a * math.sin(arg + _PHASE_OFFSETS[0]),
        a * math.sin(arg + _PHASE_OFFSETS[1]),
        a * math.sin(arg + _PHASE_OFFSETS[2]),
    )


def prefault_sample(cfg: GeneratorConfig, t: float) -> ThreePhaseSample:
    va, vb, vc = prefault_values(cfg, t)
    return ThreePhaseSample(t, va, vb, vc)


def faulted_values(
    cfg: GeneratorConfig, scn: FaultScenario, t: float
) -> tuple[float, float, float]:
    """Post-onset triple at time t.

    Grounded faults scale each faulted phase by rho. A phase-to-phase short
    pulls both conductors toward their instantaneous midpoint by (1 - rho),
    which preserves the instantaneous sum exactly, so no zero-sequence
    voltage appears.
    """
    if scn.fault is FaultClass.NO_FAULT:
        raise ValueError("faulted_values needs a fault class; use prefault_sample")
    if t < scn.t_fault:
        raise ValueError(f"faulted_values called before onset (t={t} < {scn.t_fault})")
    v = list(prefault_values(cfg, t))
    rho = scn.rho
    if scn.fault.pair_to_pair:
        i, j = sorted(scn.fault.phases)
        mid = (v[i] + v[j]) / 2.0
        v[i] = rho * v[i] + (1.0 - rho) * mid
        v[j] = rho * v[j] + (1.0 - rho) * mid
    else:
        for p in scn.fault.phases:
            v[p] = rho * v[p]
    return (v[0], v[1], v[2])


def faulted_sample(cfg: GeneratorConfig, scn: FaultScenario, t: float) -> ThreePhaseSample:
    va, vb, vc = faulted_values(cfg, scn, t)
    return ThreePhaseSample(t, va, vb, vc)


# ---- Run-level generation ----


@dataclass(frozen=True)
class WaveformTrace:
    """A full run of samples on the uniform grid t_k = k / fs."""

    cfg: GeneratorConfig
    scn: FaultScenario
    t: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    vc: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def sample(self, k: int) -> ThreePhaseSample:
        return ThreePhaseSample(
            float(self.t[k]), float(self.va[k]), float(self.vb[k]), float(self.vc[k])
        )

    def __iter__(self) -> Iterator[ThreePhaseSample]:
        for k in range(len(self.t)):
            yield self.sample(k)


def sample_count(cfg: GeneratorConfig) -> int:
    """Number of grid points: k = 0 .. floor(duration * fs), inclusive."""
    # the 1e-9 guard keeps exact products like 0.3 * 10000 from flooring short
    return int(math.floor(cfg.duration * cfg.fs + 1e-9)) + 1


def generate(cfg: GeneratorConfig, scn: FaultScenario) -> WaveformTrace:
    """Produce the full run; prefault template before t_fault, fault template after.

    Every sample is computed through the same scalar template functions, so a
    row of the returned arrays equals the corresponding prefault_sample or
    faulted_sample call bit for bit, and repeated calls are bit-identical.
    """
    if scn.fault is not FaultClass.NO_FAULT and not scn.t_fault < cfg.duration:
        raise ValueError(
            f"FaultScenario.t_fault must lie inside the run "
            f"(t_fault={scn.t_fault}, duration={cfg.duration})"
        )
    n = sample_count(cfg)
    fs = cfg.fs
    faulted = scn.fault is not FaultClass.NO_FAULT
    t_fault = scn.t_fault
    rows = np.empty((n, 3))
    times = np.empty(n)
    for k in range(n):
        t = k / fs
        times[k] = t
        if faulted and t >= t_fault:
            rows[k] = faulted_values(cfg, scn, t)
        else:
            rows[k] = prefault_values(cfg, t)
    return WaveformTrace(cfg, scn, times, rows[:, 0], rows[:, 1], rows[:, 2])
