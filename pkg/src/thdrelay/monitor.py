"""Per-phase streaming voltage monitor: fundamental amplitude tracking,
harmonic-residual distortion, and zero-sequence magnitude.

The core element is a second-order generalized integrator (SOGI) locked to a
fixed grid frequency. Its band-pass output tracks the fundamental component
v' of the input and the auxiliary integrator supplies the quadrature qv', so
the instantaneous fundamental amplitude is sqrt(v'^2 + qv'^2) and the
residual e = v - v' carries the harmonic content plus any transient burst.

Distortion is measured as the RMS-equivalent of a sharpened residual over a
first-order mean-square filter, expressed in percent of the tracked
amplitude. All filters are discretized with the trapezoidal (bilinear) rule
and start from zero state; callers are expected to mask the first few
fundamental cycles while the states converge.

Two execution paths are provided and tested against each other: per-sample
classes for streaming use, and an lfilter-based batch path (analyze) that
produces identical output sequences for whole runs at array speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .waveform import ThreePhaseSample

SQRT2 = math.sqrt(2.0)

# default mean-square smoothing bandwidth, Hz
DEFAULT_FC = 25.0
# amplitude floor for the distortion ratio, pu; keeps THD finite through
# bolted faults where the tracked amplitude collapses to zero
DEFAULT_EPS_AMP = 0.05
# damping of the re-notched residual used for distortion measurement; the
# tracker's own k is tuned for response speed, not harmonic selectivity
DEFAULT_NOTCH_DAMPING = 0.7


# ---- Parameters ----


@dataclass(frozen=True)
class SogiParams:
    """Tracker tuning. omega0 is the locked grid frequency in rad/s."""

    k: float = SQRT2              # damping gain; sqrt(2) gives a critically flat band-pass
    omega0: float = 2.0 * math.pi * 50.0
    fs: float = 10_000.0          # sample rate, Hz

    def __post_init__(self) -> None:
        if not self.k > 0.0:
            raise ValueError(f"SogiParams.k must be > 0 (got {self.k})")
        if not self.omega0 > 0.0:
            raise ValueError(f"SogiParams.omega0 must be > 0 (got {self.omega0})")
        # resolvable fundamental: at least ~20 samples per cycle
        if not self.fs >= 20.0 * self.omega0 / (2.0 * math.pi):
            raise ValueError(
                f"SogiParams.fs too low for omega0 (fs={self.fs}, omega0={self.omega0})"
            )


@dataclass
class PhaseMetrics:
    """Streaming outputs for one phase at one sample."""

    amp: float            # tracked fundamental amplitude, pu
    thd: float            # distortion in percent of the tracked amplitude
    e: float              # instantaneous residual v - v'
    amp_floored: bool     # True when the amplitude floor capped the THD denominator


# ---- Filter coefficient helpers (bilinear transform) ----


def sogi_coefficients(p: SogiParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Discrete transfer functions of the tracker.

    Returns (b_bp, b_quad, a) where b_bp/a maps v -> v', b_quad/a maps
    v -> qv', both with the shared denominator a.
    """
    lam = 2.0 * p.fs
    g = p.k * p.omega0
    w2 = p.omega0 * p.omega0
    den0 = lam * lam + g * lam + w2
    a = np.array([1.0, 2.0 * (w2 - lam * lam) / den0, (lam * lam - g * lam + w2) / den0])
    b_bp = np.array([g * lam / den0, 0.0, -g * lam / den0])
    gq = g * p.omega0
    b_quad = np.array([gq / den0, 2.0 * gq / den0, gq / den0])
    return b_bp, b_quad, a

def notch_sharpen_coefficients(p: SogiParams, damping: float) -> tuple[np.ndarray, np.ndarray]:
    """Biquad that cancels the tracker's band-pass skirt on the residual and
    re-notches the fundamental with the given (smaller) damping, so harmonic
    components reach the mean-square stage nearly unattenuated."""
    if not 0.0 < damping <= p.k:
        raise ValueError(f"notch damping must be in (0, k] (got {damping})")
    lam = 2.0 * p.fs
    w2 = p.omega0 * p.omega0
    num_g = p.k * p.omega0
    den_g = damping * p.omega0
    den0 = lam * lam + den_g * lam + w2
    b = np.array(
        [
            (lam * lam + num_g * lam + w2) / den0,
            2.0 * (w2 - lam * lam) / den0,
            (lam * lam - num_g * lam + w2) / den0,
        ]
    )
    a = np.array([1.0, 2.0 * (w2 - lam * lam) / den0, (lam * lam - den_g * lam + w2) / den0])
    return b, a


def lowpass_gain(fc: float, fs: float) -> float:
    """Per-sample blend factor of the first-order smoother; exact DC gain 1."""
    if not 0.0 < fc < fs / 2.0:
        raise ValueError(f"low-pass fc must be in (0, fs/2) (got fc={fc}, fs={fs})")
    return 1.0 - math.exp(-2.0 * math.pi * fc / fs)


# ---- Streaming elements ----


class LowPass:
    """First-order smoother y <- y + g * (x - y), zero initial state."""

    def __init__(self, fc: float, fs: float) -> None:
        self.gain = lowpass_gain(fc, fs)
        self.y = 0.0

    def step(self, x: float) -> float:
        self.y += self.gain * (x - self.y)
        return self.y


class Biquad:
    """Direct-form II transposed second-order section, zero initial state."""

    def __init__(self, b: np.ndarray, a: np.ndarray) -> None:
        self.b0, self.b1, self.b2 = float(b[0]), float(b[1]), float(b[2])
        self.a1, self.a2 = float(a[1]), float(a[2])
        self.z1 = 0.0
        self.z2 = 0.0

    def step(self, x: float) -> float:
        y = self.b0 * x + self.z1
        self.z1 = self.b1 * x - self.a1 * y + self.z2
        self.z2 = self.b2 * x - self.a2 * y
        return y


class Sogi:
    """Streaming fundamental tracker for one phase.

    Integrates the two-state system
        d(v')/dt  = k*w0*(v - v') - w0*qv'
        d(qv')/dt = w0*v'
    with the trapezoidal rule. step() consumes one input sample and returns
    (e, amp) where e = v - v' and amp = sqrt(v'^2 + qv'^2).

    A non-finite input poisons the state: the fault flag latches and the
    step raises instead of letting NaN propagate silently.
    """

    def __init__(self, params: SogiParams) -> None:
        self.params = params
        h = 0.5 / params.fs           # half sample period
        hw = h * params.omega0
        khw = params.k * hw
        det = 1.0 + khw + hw * hw
        self._hw = hw
        self._khw = khw
        self._inv_det = 1.0 / det
        self.v_prime = 0.0
        self.qv_prime = 0.0
        self._u_prev = 0.0
        self.faulted = False

    def step(self, v: float) -> tuple[float, float]:
        if not math.isfinite(v):
            self.faulted = True
            raise ValueError(f"non-finite input sample {v!r} poisons the tracker state")
        hw = self._hw
        khw = self._khw
        p1 = (1.0 - khw) * self.v_prime - hw * self.qv_prime + khw * (self._u_prev + v)
        p2 = hw * self.v_prime + self.qv_prime
        v1 = (p1 - hw * p2) * self._inv_det
        v2 = (hw * p1 + (1.0 + khw) * p2) * self._inv_det
        self.v_prime = v1
        self.qv_prime = v2
        self._u_prev = v
        return v - v1, math.hypot(v1, v2)


class ThdEstimator:
    """Distortion ratio from the tracker residual.

    The residual passes through the sharpening biquad, is mean-squared by the
    low-pass, and scaled to percent of the tracked amplitude:
        THD = 100 * sqrt(2 * LPF[e~^2]) / max(amp, eps_amp)
    When the floor is active (amp below eps_amp, e.g. during a bolted fault)
    the returned flag is True.
    """

    def __init__(
        self,
        params: SogiParams,
        fc: float = DEFAULT_FC,
        eps_amp: float = DEFAULT_EPS_AMP,
        notch_damping: float = DEFAULT_NOTCH_DAMPING,
    ) -> None:
        if not eps_amp > 0.0:
            raise ValueError(f"eps_amp must be > 0 (got {eps_amp})")
        b, a = notch_sharpen_coefficients(params, notch_damping)
        self._sharpen = Biquad(b, a)
        self._ms = LowPass(fc, params.fs)
        self.eps_amp = eps_amp

    def step(self, e: float, amp: float) -> tuple[float, bool]:
        es = self._sharpen.step(e)
        y = self._ms.step(es * es)
        floored = amp < self.eps_amp
        den = self.eps_amp if floored else amp
        return 100.0 * math.sqrt(2.0 * y) / den, floored


class PhaseMonitor:
    """Tracker plus distortion estimator for a single phase."""

    def __init__(
        self,
        params: SogiParams,
        fc: float = DEFAULT_FC,
        eps_amp: float = DEFAULT_EPS_AMP,
        notch_damping: float = DEFAULT_NOTCH_DAMPING,
    ) -> None:
        self.sogi = Sogi(params)
        self.thd = ThdEstimator(params, fc, eps_amp, notch_damping)

    def step(self, v: float) -> PhaseMetrics:
        e, amp = self.sogi.step(v)
        thd, floored = self.thd.step(e, amp)
        return PhaseMetrics(amp=amp, thd=thd, e=e, amp_floored=floored)


def zero_sequence(s: ThreePhaseSample) -> float:
    """Instantaneous zero-sequence voltage, the mean of the three phases."""
    return (s.va + s.vb + s.vc) / 3.0


class ZeroSequenceMonitor:
    """RMS-equivalent magnitude of the zero-sequence component.

    Squares the instantaneous zero-sequence voltage, smooths it, and converts
    the mean square back to a sinusoid amplitude: v0_mag = sqrt(2 * LPF[v0^2]).
    Identically zero input gives identically zero output.
    """

    def __init__(self, fc: float, fs: float) -> None:
        self._ms = LowPass(fc, fs)

    def step(self, v0: float) -> float:
        return math.sqrt(2.0 * self._ms.step(v0 * v0))


class ThreePhaseMonitor:
    """Three phase monitors plus the zero-sequence channel, in lockstep."""

    def __init__(
        self,
        params: SogiParams,
        fc: float = DEFAULT_FC,
        eps_amp: float = DEFAULT_EPS_AMP,
        notch_damping: float = DEFAULT_NOTCH_DAMPING,
    ) -> None:
        self.phases = tuple(
            PhaseMonitor(params, fc, eps_amp, notch_damping) for _ in range(3)
        )
        self.zero_seq = ZeroSequenceMonitor(fc, params.fs)

    def step(
        self, s: ThreePhaseSample
    ) -> tuple[tuple[PhaseMetrics, PhaseMetrics, PhaseMetrics], float, float]:
        m = tuple(mon.step(v) for mon, v in zip(self.phases, s.values()))
        v0 = zero_sequence(s)
        v0_mag = self.zero_seq.step(v0)
        return m, v0, v0_mag  # type: ignore[return-value]


# ---- Batch path ----


@dataclass(frozen=True)
class MetricsTrace:
    """Whole-run monitor outputs as (n, 3) arrays plus the v0 channel."""

    amp: np.ndarray        # tracked amplitude per phase, (n, 3)
    thd: np.ndarray        # distortion percent per phase, (n, 3)
    e: np.ndarray          # raw residual per phase, (n, 3)
    amp_floored: np.ndarray  # bool, (n, 3)
    v0: np.ndarray         # instantaneous zero-sequence, (n,)
    v0_mag: np.ndarray     # smoothed zero-sequence magnitude, (n,)


def _lowpass_filter(x: np.ndarray, fc: float, fs: float, axis: int = 0) -> np.ndarray:
    g = lowpass_gain(fc, fs)
    return lfilter([g], [1.0, g - 1.0], x, axis=axis)


def analyze(
    va: np.ndarray,
    vb: np.ndarray,
    vc: np.ndarray,
    params: SogiParams,
    fc: float = DEFAULT_FC,
    eps_amp: float = DEFAULT_EPS_AMP,
    notch_damping: float = DEFAULT_NOTCH_DAMPING,
) -> MetricsTrace:
    """Vectorized equivalent of streaming ThreePhaseMonitor over whole arrays.

    Same transfer functions, same zero initial state; outputs match the
    per-sample path to roundoff (pinned by tests), at lfilter speed.
    """
    if not eps_amp > 0.0:
        raise ValueError(f"eps_amp must be > 0 (got {eps_amp})")
    v = np.column_stack([np.asarray(va, float), np.asarray(vb, float), np.asarray(vc, float)])
    b_bp, b_quad, a = sogi_coefficients(params)
    v_prime = lfilter(b_bp, a, v, axis=0)
    qv_prime = lfilter(b_quad, a, v, axis=0)
    amp = np.hypot(v_prime, qv_prime)
    e = v - v_prime
    b_n, a_n = notch_sharpen_coefficients(params, notch_damping)
    e_sharp = lfilter(b_n, a_n, e, axis=0)
    ms = _lowpass_filter(e_sharp * e_sharp, fc, params.fs)
    floored = amp < eps_amp
    thd = 100.0 * np.sqrt(2.0 * ms) / np.maximum(amp, eps_amp)
    v0 = (v[:, 0] + v[:, 1] + v[:, 2]) / 3.0
    v0_mag = np.sqrt(2.0 * _lowpass_filter(v0 * v0, fc, params.fs))
    return MetricsTrace(
        amp=amp, thd=thd, e=e, amp_floored=floored, v0=v0, v0_mag=v0_mag
    )
