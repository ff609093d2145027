"""Command-line entry points: simulate, calibrate, analyze, serve, emulate-device."""

from __future__ import annotations

import argparse
import sys

from sloshpulse import harness
from sloshpulse.calibration import MotionSpec
from sloshpulse.errors import ConfigurationError, FormatError, InputError, SimulationFault


def _load_config(args) -> harness.SessionConfig:
    config = harness.SessionConfig.load(args.config) if args.config else harness.SessionConfig()
    return config.with_seed(getattr(args, "seed", None))


def cmd_simulate(args):
    config = _load_config(args)
    summary = harness.run_simulate(config, args.trajectory, args.events, args.cog)
    print(
        f"{summary['steps']} steps, {summary['pulses']} pulses "
        f"(by cause: {summary['by_cause'] or '{}'})"
    )
    return 0


def cmd_calibrate(args):
    config = _load_config(args)
    mix = None
    if args.mix:
        with open(args.mix) as fh:
            mix = _read_mix(fh.read())
    report = harness.run_calibrate(config, mix=mix, report_out=args.report, seed=args.seed)
    print(
        f"p25={report.p25:g} p50={report.p50:g} p75={report.p75:g} p90={report.p90:g} "
        f"({report.sample_count} samples)"
    )
    print(f"selected threshold: {report.selected:g}")
    return 0


def _read_mix(text):
    """Motion mix file: one 'kind amplitude frequency duration' per line."""
    mix = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"mix line {lineno}: expected 'kind amplitude frequency duration'")
        mix.append(
            MotionSpec(
                kind=parts[0],
                amplitude=float(parts[1]),
                frequency=float(parts[2]),
                duration=float(parts[3]),
            )
        )
    return mix


def cmd_analyze(args):
    report = harness.run_analyze(args.wav, noise_floor=args.noise_floor)
    if args.report:
        with open(args.report, "w") as fh:
            harness.write_analysis_report(report, fh)
    for entry in report["files"]:
        if "error" in entry:
            print(f"{entry['file']}: ERROR {entry['error']}", file=sys.stderr)
        else:
            extra = (
                f" ratio={entry['ratio']:.3f} {entry['classification']}"
                if "ratio" in entry
                else ""
            )
            print(f"{entry['file']}: {entry['duration_ms']:.2f} ms{extra}")
    if report["mean_duration_ms"] is not None:
        print(f"mean duration: {report['mean_duration_ms']:.2f} ms")
    return 0


def cmd_serve(args):
    from sloshpulse.server import serve

    config = _load_config(args)
    print(f"session service on {args.host}:{args.port}")
    serve(config, args.port, host=args.host)
    return 0


def cmd_emulate_device(args):
    from sloshpulse.server import emulate_device

    print(f"device emulator on {args.host}:{args.port}")
    emulator = emulate_device(args.port, host=args.host)
    dump = emulator.state_dump()
    print(f"session ended: {dump['faults']} faults, {dump['energy_joules']:.3f} J")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="sloshpulse")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run fluid + engine over a trajectory file")
    p.add_argument("trajectory", help="trajectory file (t x y z [qw qx qy qz])")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--events", required=True, help="event log output path")
    p.add_argument("--cog", help="optional CoG trace output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="derive acceleration thresholds from a motion mix")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--mix", help="motion mix file (kind amplitude frequency duration)")
    p.add_argument("--report", help="threshold report output path")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("analyze", help="measure impact durations in WAV recordings")
    p.add_argument("wav", nargs="+", help="16-bit PCM WAV files")
    p.add_argument("--noise-floor", type=float, default=0.01)
    p.add_argument("--report", help="per-file report output path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="live session service (framed JSON over TCP)")
    p.add_argument("--config", help="session config JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7421)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("emulate-device", help="firmware emulator endpoint (raw frames in)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7422)
    p.set_defaults(func=cmd_emulate_device)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, InputError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
