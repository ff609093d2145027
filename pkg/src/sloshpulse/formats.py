"""Line-delimited text formats for trajectories, CoG traces, event logs, and reports.

One record per line, space-separated fields, '#' comments. Field orders:

  trajectory: t x y z qw qx qy qz       (pose stream, world frame)
  cog trace:  t x y z                   (vessel-local CoG per step)
  event log:  t_start motor duration_ms strength cause
  threshold report: key value           (p25/p50/p75/p90/selected/sample_count/seed)
"""

from __future__ import annotations

import dataclasses
import io

from sloshpulse.calibration import ThresholdReport
from sloshpulse.engine import PulseCommand
from sloshpulse.errors import FormatError
from sloshpulse.motion import PoseSample


def _records(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def write_trajectory(poses, fh):
    fh.write("# t x y z qw qx qy qz\n")
    for p in poses:
        x, y, z = p.position
        qw, qx, qy, qz = p.orientation
        fh.write(f"{p.t:.9f} {x:.9f} {y:.9f} {z:.9f} {qw:.9f} {qx:.9f} {qy:.9f} {qz:.9f}\n")


def read_trajectory(text) -> list:
    poses = []
    for lineno, fields in _records(text):
        if len(fields) not in (4, 8):
            raise FormatError(f"trajectory line {lineno}: expected 4 or 8 fields")
        try:
            vals = [float(v) for v in fields]
        except ValueError:
            raise FormatError(f"trajectory line {lineno}: non-numeric field") from None
        orientation = tuple(vals[4:8]) if len(vals) == 8 else (1.0, 0.0, 0.0, 0.0)
        poses.append(PoseSample(t=vals[0], position=tuple(vals[1:4]), orientation=orientation))
    if poses and any(b.t <= a.t for a, b in zip(poses, poses[1:])):
        raise FormatError("trajectory timestamps must be strictly increasing")
    return poses


def write_cog_trace(samples, fh):
    fh.write("# t x y z\n")
    for s in samples:
        x, y, z = s.cog
        fh.write(f"{s.t:.9f} {x:.9f} {y:.9f} {z:.9f}\n")


def write_events(commands, fh):
    fh.write("# t_start motor duration_ms strength cause\n")
    for c in commands:
        fh.write(f"{c.t_start:.6f} {c.motor} {c.duration_ms:g} {c.strength} {c.cause}\n")


def read_events(text) -> list:
    commands = []
    for lineno, fields in _records(text):
        if len(fields) != 5:
            raise FormatError(f"event line {lineno}: expected 5 fields")
        try:
            commands.append(
                PulseCommand(
                    t_start=float(fields[0]),
                    motor=int(fields[1]),
                    duration_ms=float(fields[2]),
                    strength=int(fields[3]),
                    cause=fields[4],
                )
            )
        except ValueError:
            raise FormatError(f"event line {lineno}: bad field") from None
    return commands


def write_threshold_report(report: ThresholdReport, fh):
    for key, value in dataclasses.asdict(report).items():
        fh.write(f"{key} {value!r}\n")


def read_threshold_report(text) -> ThresholdReport:
    fields = {}
    for lineno, parts in _records(text):
        if len(parts) != 2:
            raise FormatError(f"report line {lineno}: expected 'key value'")
        fields[parts[0]] = parts[1]
    try:
        return ThresholdReport(
            p25=float(fields["p25"]),
            p50=float(fields["p50"]),
            p75=float(fields["p75"]),
            p90=float(fields["p90"]),
            selected=float(fields["selected"]),
            sample_count=int(fields["sample_count"]),
            seed=int(fields["seed"]),
        )
    except KeyError as exc:
        raise FormatError(f"report missing field {exc}") from None


def dumps(writer, items) -> str:
    buf = io.StringIO()
    writer(items, buf)
    return buf.getvalue()
