"""Waveform templates: fault codes, injection algebra, trace generation."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from thdrelay.waveform import (
    FaultClass,
    FaultScenario,
    GeneratorConfig,
    generate,
    faulted_values,
    prefault_values,
    sample_count,
)

TWO_PI = 2.0 * math.pi

# (code, name, faulted phase indices, grounded, pair-to-pair)
CLASS_TABLE = [
    (0, "NO_FAULT", set(), False, False),
    (1, "AG", {0}, True, False),
    (2, "BG", {1}, True, False),
    (3, "CG", {2}, True, False),
    (4, "AB", {0, 1}, False, True),
    (5, "BC", {1, 2}, False, True),
    (6, "CA", {0, 2}, False, True),
    (7, "ABG", {0, 1}, True, False),
    (8, "BCG", {1, 2}, True, False),
    (9, "CAG", {0, 2}, True, False),
    (10, "THREE_PHASE", {0, 1, 2}, True, False),
]


def test_fault_class_codes_and_properties():
    for code, name, phases, grounded, pair in CLASS_TABLE:
        fc = FaultClass(code)
        assert fc.name == name
        assert int(fc) == code
        assert fc.phases == frozenset(phases), name
        assert fc.grounded is grounded, name
        assert fc.pair_to_pair is pair, name


def test_fault_class_parse_accepts_names_codes_and_aliases():
    assert FaultClass.parse("AG") is FaultClass.AG
    assert FaultClass.parse("bc") is FaultClass.BC
    assert FaultClass.parse(" cag ") is FaultClass.CAG
    assert FaultClass.parse("10") is FaultClass.THREE_PHASE
    assert FaultClass.parse(7) is FaultClass.ABG
    assert FaultClass.parse(FaultClass.BG) is FaultClass.BG
    for alias in ("none", "NOFAULT", "no_fault"):
        assert FaultClass.parse(alias) is FaultClass.NO_FAULT
    for alias in ("3PH", "3phg", "3ph_g", "abc", "ABCG", "threephase"):
        assert FaultClass.parse(alias) is FaultClass.THREE_PHASE


def test_fault_class_parse_rejects_garbage():
    with pytest.raises(ValueError):
        FaultClass.parse("XYZ")
    with pytest.raises(ValueError):
        FaultClass.parse(11)
    with pytest.raises(ValueError):
        FaultClass.parse(-1)


def test_prefault_is_balanced_three_phase():
    cfg = GeneratorConfig(f0=50.0, fs=10_000.0, amplitude=2.5, onset_angle=0.3)
    for t in (0.0, 0.0123, 0.02, 0.5):
        va, vb, vc = prefault_values(cfg, t)
        arg = TWO_PI * cfg.f0 * t + cfg.onset_angle
        assert va == pytest.approx(2.5 * math.sin(arg), abs=1e-12)
        assert vb == pytest.approx(2.5 * math.sin(arg - TWO_PI / 3), abs=1e-12)
        assert vc == pytest.approx(2.5 * math.sin(arg + TWO_PI / 3), abs=1e-12)
        # balanced set sums to zero
        assert va + vb + vc == pytest.approx(0.0, abs=1e-12)


def test_phase_b_lags_a_by_a_third_cycle():
    cfg = GeneratorConfig()
    period = 1.0 / cfg.f0
    for t in (0.0, 0.004, 0.0111):
        va, _, _ = prefault_values(cfg, t)
        _, vb, _ = prefault_values(cfg, t + period / 3.0)
        assert vb == pytest.approx(va, abs=1e-9)


def test_single_phase_fault_scales_one_phase():
    cfg = GeneratorConfig()
    scn = FaultScenario(fault=FaultClass.BG, t_fault=0.1, rho=0.3)
    t = 0.1234
    va0, vb0, vc0 = prefault_values(cfg, t)
    va, vb, vc = faulted_values(cfg, scn, t)
    assert va == va0 and vc == vc0
    assert vb == pytest.approx(0.3 * vb0, abs=1e-15)


def test_three_phase_fault_scales_all_phases():
    cfg = GeneratorConfig()
    scn = FaultScenario(fault=FaultClass.THREE_PHASE, t_fault=0.05, rho=0.0)
    va, vb, vc = faulted_values(cfg, scn, 0.21)
    assert va == 0.0 and vb == 0.0 and vc == 0.0


def test_grounded_pair_fault_breaks_zero_sum():
    cfg = GeneratorConfig()
    scn = FaultScenario(fault=FaultClass.BCG, t_fault=0.1, rho=0.0)
    # residual (va + vb + vc)/3 becomes nonzero once b and c collapse
    seen = 0.0
    for t in (0.102, 0.105, 0.113):
        va, vb, vc = faulted_values(cfg, scn, t)
        assert vb == 0.0 and vc == 0.0
        seen = max(seen, abs(va + vb + vc) / 3.0)
    assert seen > 0.2


def test_pair_fault_pulls_both_phases_to_midpoint():
    cfg = GeneratorConfig()
    t = 0.152
    va0, vb0, vc0 = prefault_values(cfg, t)
    # bolted: both faulted phases land exactly on their midpoint
    scn = FaultScenario(fault=FaultClass.CA, t_fault=0.1, rho=0.0)
    va, vb, vc = faulted_values(cfg, scn, t)
    mid = (vc0 + va0) / 2.0
    assert va == mid and vc == mid
    assert vb == vb0
    # partial: convex combination between original and midpoint
    scn = FaultScenario(fault=FaultClass.CA, t_fault=0.1, rho=0.4)
    va, vb, vc = faulted_values(cfg, scn, t)
    assert va == pytest.approx(0.4 * va0 + 0.6 * mid, abs=1e-15)
    assert vc == pytest.approx(0.4 * vc0 + 0.6 * mid, abs=1e-15)


def test_pair_fault_keeps_residual_at_zero():
    # the ungrounded pair signature: phase sum unchanged, so v0 stays 0
    cfg = GeneratorConfig()
    for code in (FaultClass.AB, FaultClass.BC, FaultClass.CA):
        scn = FaultScenario(fault=code, t_fault=0.08, rho=0.25)
        for t in (0.081, 0.1, 0.19):
            va0, vb0, vc0 = prefault_values(cfg, t)
            va, vb, vc = faulted_values(cfg, scn, t)
            assert va + vb + vc == pytest.approx(va0 + vb0 + vc0, abs=1e-15)
            assert va + vb + vc == pytest.approx(0.0, abs=1e-12)


def test_faulted_values_rejects_invalid_use():
    cfg = GeneratorConfig()
    scn = FaultScenario(fault=FaultClass.AG, t_fault=0.1)
    with pytest.raises(ValueError):
        faulted_values(cfg, scn, 0.05)  # before onset
    clean = FaultScenario(fault=FaultClass.NO_FAULT)
    with pytest.raises(ValueError):
        faulted_values(cfg, clean, 0.2)


def test_scenario_validation():
    FaultScenario(fault=FaultClass.AG, t_fault=0.0, rho=0.0)  # boundary ok
    with pytest.raises(ValueError):
        FaultScenario(fault=FaultClass.AG, rho=1.0)  # rho must stay below 1
    with pytest.raises(ValueError):
        FaultScenario(fault=FaultClass.AG, rho=-0.1)
    with pytest.raises(ValueError):
        FaultScenario(fault=FaultClass.AG, t_fault=-0.01)


def test_scenario_coerces_fault_spelling():
    scn = FaultScenario(fault="bcg", t_fault=0.1)
    assert scn.fault is FaultClass.BCG


def test_generator_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(f0=0.0)
    with pytest.raises(ValueError):
        GeneratorConfig(fs=0.0)
    with pytest.raises(ValueError):
        GeneratorConfig(duration=0.0)
    with pytest.raises(ValueError):
        GeneratorConfig(amplitude=-1.0)
    with pytest.raises(ValueError):
        GeneratorConfig(f0=50.0, fs=900.0)  # under 20 samples per cycle


def test_configs_are_frozen():
    cfg = GeneratorConfig()
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.fs = 1.0
    scn = FaultScenario()
    with pytest.raises(dataclasses.FrozenInstanceError):
        scn.rho = 0.5


def test_sample_count_covers_endpoint():
    assert sample_count(GeneratorConfig(duration=0.4, fs=10_000.0)) == 4001
    assert sample_count(GeneratorConfig(duration=1.0, fs=10_000.0)) == 10_001
    # durations that are not exact sample multiples round down
    assert sample_count(GeneratorConfig(duration=0.40004, fs=10_000.0)) == 4001
    # float grid points that land within 1e-9 of the endpoint still count
    assert sample_count(GeneratorConfig(duration=0.1 + 0.2, fs=10_000.0)) == 3001


def test_generate_matches_scalar_evaluation_bitwise():
    cfg = GeneratorConfig(duration=0.05, onset_angle=1.1)
    scn = FaultScenario(fault=FaultClass.CAG, t_fault=0.021, rho=0.15)
    trace = generate(cfg, scn)
    assert len(trace) == sample_count(cfg)
    for k in (0, 1, 209, 210, 211, 300, len(trace) - 1):
        t = k / cfg.fs
        assert trace.t[k] == t
        if t < scn.t_fault:
            expect = prefault_values(cfg, t)
        else:
            expect = faulted_values(cfg, scn, t)
        assert (trace.va[k], trace.vb[k], trace.vc[k]) == expect, k


def test_generate_onset_boundary_sample_is_faulted():
    cfg = GeneratorConfig(duration=0.05)
    scn = FaultScenario(fault=FaultClass.THREE_PHASE, t_fault=0.02, rho=0.0)
    trace = generate(cfg, scn)
    k = int(0.02 * cfg.fs)
    assert trace.t[k] == 0.02
    # onset sample itself uses the faulted template
    assert trace.va[k] == 0.0 and trace.vb[k] == 0.0 and trace.vc[k] == 0.0
    before = k - 1
    assert abs(trace.vb[before]) > 0.1


def test_generate_clean_run_has_no_fault_anywhere():
    cfg = GeneratorConfig(duration=0.06)
    trace = generate(cfg, FaultScenario())
    t = np.asarray(trace.t)
    expect = np.sin(TWO_PI * cfg.f0 * t)
    assert np.allclose(trace.va, expect, atol=1e-12)


def test_generate_rejects_onset_outside_run():
    cfg = GeneratorConfig(duration=0.1)
    with pytest.raises(ValueError):
        generate(cfg, FaultScenario(fault=FaultClass.AG, t_fault=0.1))
    # a clean scenario carries no onset, any duration is fine
    generate(cfg, FaultScenario(fault=FaultClass.NO_FAULT, t_fault=0.5))


def test_trace_iteration_and_indexing():
    cfg = GeneratorConfig(duration=0.01)
    trace = generate(cfg, FaultScenario())
    samples = list(trace)
    assert len(samples) == len(trace)
    s = trace.sample(7)
    assert s.t == trace.t[7]
    assert s.values() == (trace.va[7], trace.vb[7], trace.vc[7])
    assert samples[7] == s
