"""End-to-end pipeline wiring: session configuration and the batch entry points."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from sloshpulse import acoustics, calibration, formats
from sloshpulse.engine import TriggerConfig, run_engine
from sloshpulse.errors import ConfigurationError, FormatError
from sloshpulse.fluid import FluidParams, simulate_trace
from sloshpulse.vessel import builtin_profile, layout_actuators, load_profile

DEFAULT_FILL_HEIGHT = 0.08  # m, nominal CoG excursion scale for the vertical rule


@dataclass(frozen=True)
class SessionConfig:
    """Everything one simulation session needs, JSON-loadable."""

    vessel: str = "beaker"
    motor_count: int = 8
    ring_height: float = 0.040
    anchor_height: float = 0.020
    mounting: str = "inside"
    fill_height: float = DEFAULT_FILL_HEIGHT
    fluid: FluidParams = field(default_factory=FluidParams)
    trigger: TriggerConfig = field(default_factory=TriggerConfig)

    def profile(self):
        return builtin_profile(self.vessel) if not self.vessel.endswith(".txt") else load_profile(self.vessel)

    def layout(self):
        return layout_actuators(
            self.profile(),
            self.motor_count,
            ring_height=self.ring_height,
            anchor_height=self.anchor_height,
            mounting=self.mounting,
        )

    @classmethod
    def from_dict(cls, data: dict) -> "SessionConfig":
        data = dict(data)
        fluid = FluidParams(**data.pop("fluid", {}))
        trigger = TriggerConfig(**data.pop("trigger", {}))
        try:
            return cls(fluid=fluid, trigger=trigger, **data)
        except TypeError as exc:
            raise ConfigurationError(f"bad session config: {exc}") from None

    @classmethod
    def load(cls, path) -> "SessionConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: {exc}") from None
        return cls.from_dict(data)

    def with_seed(self, seed) -> "SessionConfig":
        if seed is None:
            return self
        return replace(self, fluid=replace(self.fluid, seed=seed))


def run_simulate(config: SessionConfig, trajectory_path, events_out, cog_out=None) -> dict:
    """Step the fluid over a trajectory file, run the engine, write the event log."""
    with open(trajectory_path) as fh:
        poses = formats.read_trajectory(fh.read())
    profile = config.profile()
    trace = simulate_trace(profile, config.fluid, poses)
    commands = run_engine(trace, config.layout(), config.trigger, config.fill_height)
    with open(events_out, "w") as fh:
        formats.write_events(commands, fh)
    if cog_out:
        with open(cog_out, "w") as fh:
            formats.write_cog_trace(trace, fh)
    by_cause = {}
    by_motor = {}
    for c in commands:
        by_cause[c.cause] = by_cause.get(c.cause, 0) + 1
        by_motor[c.motor] = by_motor.get(c.motor, 0) + 1
    return {
        "steps": len(trace),
        "pulses": len(commands),
        "by_cause": by_cause,
        "by_motor": by_motor,
    }


def run_calibrate(config: SessionConfig, mix=None, report_out=None, seed=None):
    """Calibrate the acceleration threshold; optionally write the report file."""
    report = calibration.calibrate(
        config.profile(),
        config.fluid,
        motion_mix=mix,
        seed=config.fluid.seed if seed is None else seed,
    )
    if report_out:
        with open(report_out, "w") as fh:
            formats.write_threshold_report(report, fh)
    return report


def run_analyze(wav_paths, noise_floor: float = 0.01):
    """Measure impact duration (and stereo asymmetry) for each file.

    Per-file failures are reported in the result, not raised; the run continues.
    """
    if not wav_paths:
        raise ConfigurationError("no input files")
    results = []
    durations = []
    for path in wav_paths:
        entry = {"file": str(path)}
        try:
            with open(path, "rb") as fh:
                clip = acoustics.load_pcm(fh.read())
            meas = acoustics.impact_duration(clip, channel=0, noise_floor=noise_floor)
            entry["duration_ms"] = meas.duration_ms
            durations.append(meas.duration_ms)
            if clip.channels == 2:
                ratio, label = acoustics.channel_asymmetry(clip)
                entry["ratio"] = ratio
                entry["classification"] = label
        except (OSError, FormatError) as exc:
            entry["error"] = str(exc)
        results.append(entry)
    mean = acoustics.mean_duration(durations) if durations else None
    return {"files": results, "mean_duration_ms": mean}


def write_analysis_report(report: dict, fh):
    fh.write("# file duration_ms ratio classification\n")
    for entry in report["files"]:
        if "error" in entry:
            fh.write(f"# ERROR {entry['file']}: {entry['error']}\n")
            continue
        ratio = entry.get("ratio")
        fh.write(
            f"{entry['file']} {entry['duration_ms']:.6f} "
            f"{'-' if ratio is None else format(ratio, '.6f')} "
            f"{entry.get('classification', '-')}\n"
        )
    if report["mean_duration_ms"] is not None:
        fh.write(f"# mean_duration_ms {report['mean_duration_ms']:.6f}\n")
