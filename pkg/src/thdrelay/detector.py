"""Debounced fault detection and classification over per-phase metrics.

Detection and classification are driven by two per-phase conditions,
each debounced over consecutive samples:

  * distortion above the THD threshold flags a disturbance (detection),
  * tracked amplitude below the sag threshold marks a phase as faulted.

The faulted-phase set plus the zero-sequence magnitude picks the output
code: single flagged phase means phase-to-ground, a flagged pair splits
into phase-to-phase (no zero-sequence) or pair-to-ground (zero-sequence
present), all three means a three-phase fault.

Phases can cross the amplitude threshold milliseconds apart (a phase near
its voltage zero at onset reacts slowest), and the zero-sequence estimate
needs a short time to build up. The classifier therefore keeps refining:
whenever the flagged set grows, or the zero-sequence magnitude crosses its
threshold, the output code is re-evaluated once the set has been stable
for the debounce window. The code never returns to 0 once a fault is
classified; t_identify records the instant of the final code assignment.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .waveform import FaultClass, FaultScenario
from .monitor import PhaseMetrics


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds for detection and classification."""

    alpha: float = 5.0            # THD detection threshold, percent
    delta_v: float = 0.925        # amplitude sag threshold, pu
    eps_v0: float = 0.05          # zero-sequence discrimination threshold, pu
    pp_amp_ceiling: float = 0.75  # expected ceiling of a pair-fault amplitude, pu;
                                  # corroboration only, never used by classify()
    debounce: int = 5             # consecutive qualifying samples required

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ValueError(f"Thresholds.alpha must be > 0 (got {self.alpha})")
        if not 0.0 < self.delta_v < 1.0:
            raise ValueError(
                f"Thresholds.delta_v must be in (0, 1) (got {self.delta_v})"
            )
        if not self.eps_v0 > 0.0:
            raise ValueError(f"Thresholds.eps_v0 must be > 0 (got {self.eps_v0})")
        if not 0.0 < self.pp_amp_ceiling <= 1.0:
            raise ValueError(
                f"Thresholds.pp_amp_ceiling must be in (0, 1] (got {self.pp_amp_ceiling})"
            )
        if not (isinstance(self.debounce, int) and self.debounce >= 1):
            raise ValueError(
                f"Thresholds.debounce must be an integer >= 1 (got {self.debounce})"
            )


# faulted-phase set -> (ungrounded code, grounded code)
_PAIR_CODES = {
    frozenset({0, 1}): (FaultClass.AB, FaultClass.ABG),
    frozenset({1, 2}): (FaultClass.BC, FaultClass.BCG),
    frozenset({0, 2}): (FaultClass.CA, FaultClass.CAG),
}
_SINGLE_CODES = {
    frozenset({0}): FaultClass.AG,
    frozenset({1}): FaultClass.BG,
    frozenset({2}): FaultClass.CG,
}


def classify(flagged: frozenset[int] | set[int], v0_mag: float, th: Thresholds) -> FaultClass:
    """Map a faulted-phase set and zero-sequence magnitude to an output code.

    Three flagged phases always classify as the three-phase fault; a pair is
    split by the zero-sequence test; a single phase is phase-to-ground.
    """
    key = frozenset(flagged)
    if not key:
        raise ValueError("classify needs a non-empty faulted-phase set")
    if not key <= {0, 1, 2}:
        raise ValueError(f"invalid phase indices in {sorted(flagged)}")
    if len(key) == 3:
        return FaultClass.THREE_PHASE
    if len(key) == 2:
        pair, grounded = _PAIR_CODES[key]
        return grounded if v0_mag > th.eps_v0 else pair
    return _SINGLE_CODES[key]


@dataclass
class DetectionReport:
    """Final outcome of one run.

    Timing fields are None for a clean run. peak_thd / min_amp / peak_v0 are
    extrema over the post-settling window and match the emitted trace
    columns; settled_amp / settled_v0 are means over the final two
    fundamental cycles. A THD-only alarm (distortion flagged but no
    amplitude sag, so the code stayed 0) is reported via the flag and its
    own timestamp, keeping the timing fields empty.
    """

    code: FaultClass
    t_detect: float | None        # first THD flag, s
    t_identify: float | None     # final code assignment, s
    latency: float | None        # t_identify - t_fault, s
    peak_thd: tuple[float, float, float]
    min_amp: tuple[float, float, float]
    peak_v0: float
    settled_amp: tuple[float, float, float]
    settled_v0: float
    thd_only_alarm: bool = False
    t_thd_alarm: float | None = None


class FaultDetector:
    """Streaming decision state machine.

    Feed update() (or update_values()) one sample at a time with strictly
    increasing timestamps. Counters are held in reset while t < settle_until
    so filter startup transients cannot trigger. finalize() assembles the
    report for the run.
    """

    def __init__(
        self,
        thresholds: Thresholds,
        fs: float,
        f0: float = 50.0,
        settle_until: float = 0.0,
    ) -> None:
        if not fs > 0.0:
            raise ValueError(f"fs must be > 0 (got {fs})")
        if not f0 > 0.0:
            raise ValueError(f"f0 must be > 0 (got {f0})")
        self.th = thresholds
        self.fs = fs
        self.settle_until = settle_until
        self.code = FaultClass.NO_FAULT
        self.t_detect: float | None = None
        self.t_identify: float | None = None
        self.thd_flag_time: list[float | None] = [None, None, None]
        self.amp_flag_time: list[float | None] = [None, None, None]
        self._thd_count = [0, 0, 0]
        self._amp_count = [0, 0, 0]
        self._n = -1                    # sample index of the latest update
        self._last_t: float | None = None
        self._last_set_change_n = -1
        self._flagged: set[int] = set()
        self._code_changes: list[tuple[int, FaultClass]] = []
        # post-settling trace statistics
        self._peak_thd = [0.0, 0.0, 0.0]
        self._min_amp = [math.inf, math.inf, math.inf]
        self._peak_v0 = 0.0
        # settled statistics, mean over the trailing two fundamental cycles
        win = max(1, round(2.0 * fs / f0))
        self._tail_amp = tuple(deque(maxlen=win) for _ in range(3))
        self._tail_v0: deque = deque(maxlen=win)

    @property
    def flagged_phases(self) -> frozenset[int]:
        return frozenset(self._flagged)

    def update(
        self,
        t: float,
        metrics: tuple[PhaseMetrics, PhaseMetrics, PhaseMetrics],
        v0_mag: float,
    ) -> FaultClass:
        ma, mb, mc = metrics
        return self.update_values(
            t, ma.amp, mb.amp, mc.amp, ma.thd, mb.thd, mc.thd, v0_mag
        )

    def update_values(
        self,
        t: float,
        amp_a: float,
        amp_b: float,
        amp_c: float,
        thd_a: float,
        thd_b: float,
        thd_c: float,
        v0_mag: float,
    ) -> FaultClass:
        if self._last_t is not None and t <= self._last_t:
            raise ValueError(
                f"out-of-order timestamp {t} (previous {self._last_t})"
            )
        self._last_t = t
        self._n += 1

        for d, x in zip(self._tail_amp, (amp_a, amp_b, amp_c)):
            d.append(x)
        self._tail_v0.append(v0_mag)

        if t < self.settle_until:
            return self.code

        th = self.th
        debounce = th.debounce
        amps = (amp_a, amp_b, amp_c)
        thds = (thd_a, thd_b, thd_c)
        for p in range(3):
            if thds[p] > th.alpha:
                if self._thd_count[p] < debounce:
                    self._thd_count[p] += 1
                    if self._thd_count[p] >= debounce and self.thd_flag_time[p] is None:
                        self.thd_flag_time[p] = t
                        if self.t_detect is None:
                            self.t_detect = t
            else:
                self._thd_count[p] = 0
            if amps[p] < th.delta_v:
                if self._amp_count[p] < debounce:
                    self._amp_count[p] += 1
                    if self._amp_count[p] >= debounce and self.amp_flag_time[p] is None:
                        self.amp_flag_time[p] = t
                        self._flagged.add(p)
                        self._last_set_change_n = self._n
            else:
                self._amp_count[p] = 0

        if (
            self._flagged
            and self._n - self._last_set_change_n >= debounce
            and all(self.thd_flag_time[p] is not None for p in self._flagged)
        ):
            new_code = classify(self._flagged, v0_mag, th)
            if new_code is not self.code:
                self.code = new_code
                self.t_identify = t
                self._code_changes.append((self._n, new_code))

        if thds[0] > self._peak_thd[0]:
            self._peak_thd[0] = thds[0]
        if thds[1] > self._peak_thd[1]:
            self._peak_thd[1] = thds[1]
        if thds[2] > self._peak_thd[2]:
            self._peak_thd[2] = thds[2]
        if amps[0] < self._min_amp[0]:
            self._min_amp[0] = amps[0]
        if amps[1] < self._min_amp[1]:
            self._min_amp[1] = amps[1]
        if amps[2] < self._min_amp[2]:
            self._min_amp[2] = amps[2]
        if v0_mag > self._peak_v0:
            self._peak_v0 = v0_mag

        return self.code

    def code_changes(self) -> list[tuple[int, FaultClass]]:
        """(sample index, new code) for every output transition, in order."""
        return list(self._code_changes)

    def finalize(self, scn: FaultScenario) -> DetectionReport:
        """Assemble the report for the finished run."""
        def tail_mean(d: deque) -> float:
            return sum(d) / len(d) if d else math.nan

        min_amp = tuple(x if math.isfinite(x) else math.nan for x in self._min_amp)
        thd_only = self.code is FaultClass.NO_FAULT and self.t_detect is not None
        latency = None
        if (
            self.code is not FaultClass.NO_FAULT
            and self.t_identify is not None
            and scn.fault is not FaultClass.NO_FAULT
        ):
            latency = self.t_identify - scn.t_fault
        return DetectionReport(
            code=self.code,
            t_detect=None if thd_only else self.t_detect,
            t_identify=self.t_identify,
            latency=latency,
            peak_thd=tuple(self._peak_thd),
            min_amp=min_amp,  # type: ignore[arg-type]
            peak_v0=self._peak_v0,
            settled_amp=tuple(tail_mean(d) for d in self._tail_amp),
            settled_v0=tail_mean(self._tail_v0),
            thd_only_alarm=thd_only,
            t_thd_alarm=self.t_detect if thd_only else None,
        )
