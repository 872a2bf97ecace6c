"""Command-line front end.

Three subcommands:

    run     single scenario -> report text (optional CSV trace)
    sweep   grid of scenarios -> summary text (optional CSV table)
    preset  bundled showcase runs by name

Every config key has a matching override flag (--t-fault for t_fault and
so on), applied on top of an optional config file. Exit status 0 means the
run completed; 2 is a configuration problem, 1 an I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .harness import (
    ConfigError,
    PRESET_NAMES,
    RunConfig,
    SweepSpec,
    _KEY_SECTION,
    format_config,
    format_report,
    format_sweep,
    parse_config,
    preset_config,
    run_scenario,
    run_sweep,
)
from .waveform import FaultClass

_FLAG_HELP = {
    "f0": "fundamental frequency, Hz",
    "fs": "sampling rate, Hz",
    "amplitude": "pre-fault peak amplitude, pu",
    "duration": "run length, s",
    "onset_angle": "phase-a angle at t = 0, rad",
    "fault": "fault class name or code (AG, BC, ABG, 10, ...)",
    "t_fault": "fault onset time, s",
    "rho": "retained-voltage fraction on faulted phases",
    "alpha": "per-phase THD alarm threshold, percent",
    "delta_v": "undervoltage threshold on tracked amplitude, pu",
    "eps_v0": "zero-sequence magnitude threshold, pu",
    "pp_amp_ceiling": "amplitude ceiling for phase-pair corroboration, pu",
    "debounce": "consecutive samples required to latch a flag",
    "k": "amplitude tracker gain",
    "fc": "smoothing filter cutoff, Hz",
    "eps_amp": "denominator floor for the distortion ratio, pu",
    "notch_damping": "residual sharpening damping ratio",
    "settle_cycles": "startup mask length, fundamental cycles",
    "trace": "per-sample CSV output path",
    "report": "report text output path",
}


def _add_override_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("config overrides")
    for key in sorted(_KEY_SECTION):
        group.add_argument(
            "--" + key.replace("_", "-"),
            dest="ov_" + key,
            metavar="VALUE",
            help=_FLAG_HELP[key],
        )


def _collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    out = {}
    for key in _KEY_SECTION:
        value = getattr(args, "ov_" + key, None)
        if value is not None:
            out[key] = value
    return out


def _load_config(args: argparse.Namespace) -> RunConfig:
    text = ""
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    return parse_config(text, overrides=_collect_overrides(args))


def _parse_faults(spec: str) -> tuple[FaultClass, ...]:
    if spec.strip().lower() == "all":
        return tuple(FaultClass(c) for c in range(1, 11))
    faults = tuple(FaultClass.parse(tok) for tok in spec.split(",") if tok.strip())
    if not faults:
        raise ConfigError(f"no fault classes in {spec!r}")
    return faults


def _parse_angles(spec: str) -> tuple[float, ...]:
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"angle range must be START:STOP[:STEP], got {spec!r}")
        start, stop = float(parts[0]), float(parts[1])
        step = float(parts[2]) if len(parts) == 3 else 10.0
        if step <= 0.0 or stop <= start:
            raise ConfigError(f"bad angle range {spec!r}")
        n = int((stop - start) / step + 1e-9)
        return tuple(start + i * step for i in range(n))
    angles = tuple(float(tok) for tok in spec.split(",") if tok.strip())
    if not angles:
        raise ConfigError(f"no angles in {spec!r}")
    return angles


def _parse_rhos(spec: str) -> tuple[float, ...]:
    rhos = tuple(float(tok) for tok in spec.split(",") if tok.strip())
    if not rhos:
        raise ConfigError(f"no rho values in {spec!r}")
    return rhos


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    report = run_scenario(cfg)
    if not args.quiet:
        sys.stdout.write(format_report(report))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = _load_config(args)
    spec = SweepSpec(base=base)
    if args.faults is not None:
        spec = dataclasses.replace(spec, faults=_parse_faults(args.faults))
    if args.angles is not None:
        spec = dataclasses.replace(spec, angles_deg=_parse_angles(args.angles))
    if args.rhos is not None:
        spec = dataclasses.replace(spec, rhos=_parse_rhos(args.rhos))
    result = run_sweep(spec)
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_sweep(result))
    if not args.quiet:
        sys.stdout.write(result.format_summary())
    return 0


def _cmd_preset(args: argparse.Namespace) -> int:
    if args.list:
        for name in PRESET_NAMES:
            sys.stdout.write(name + "\n")
        return 0
    if args.name is None:
        raise ConfigError("preset name required (or use --list)")
    cfg = preset_config(args.name)
    if args.trace is not None or args.report is not None:
        cfg = dataclasses.replace(cfg, trace_path=args.trace, report_path=args.report)
    if args.emit_config:
        sys.stdout.write(format_config(cfg))
        return 0
    report = run_scenario(cfg)
    if not args.quiet:
        sys.stdout.write(format_report(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thdrelay",
        description="Distortion-based fault detection on synthetic three-phase voltages.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single scenario")
    p_run.add_argument("--config", metavar="FILE", help="config file path")
    p_run.add_argument("--quiet", action="store_true", help="suppress report output")
    _add_override_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of scenarios")
    p_sweep.add_argument("--config", metavar="FILE", help="base config file path")
    p_sweep.add_argument(
        "--faults", metavar="LIST", help="comma list of classes, or 'all' (default all)"
    )
    p_sweep.add_argument(
        "--angles",
        metavar="SPEC",
        help="onset angles in degrees: comma list or START:STOP[:STEP] (default 0:360:10)",
    )
    p_sweep.add_argument(
        "--rhos", metavar="LIST", help="comma list of retained fractions (default 0)"
    )
    p_sweep.add_argument("--out", metavar="FILE", help="sweep table CSV output path")
    p_sweep.add_argument("--quiet", action="store_true", help="suppress summary output")
    _add_override_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_preset = sub.add_parser("preset", help="run a bundled showcase by name")
    p_preset.add_argument("name", nargs="?", help="preset name")
    p_preset.add_argument("--list", action="store_true", help="list preset names")
    p_preset.add_argument("--trace", metavar="FILE", help="per-sample CSV output path")
    p_preset.add_argument("--report", metavar="FILE", help="report text output path")
    p_preset.add_argument(
        "--emit-config", action="store_true", help="print the config text and exit"
    )
    p_preset.add_argument("--quiet", action="store_true", help="suppress report output")
    p_preset.set_defaults(func=_cmd_preset)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
