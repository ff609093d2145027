"""Acceleration-threshold calibration from synthetic vessel motion.

Generates canonical sway/shake/swirl trajectories, runs the fluid solver over
a motion mix, and reports percentiles of the per-step CoG acceleration
magnitude. The selected trigger threshold is the 25th percentile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from sloshpulse.errors import ConfigurationError, InputError
from sloshpulse.fluid import FluidParams, FluidSimulator
from sloshpulse.motion import PoseSample

KINDS = ("sway", "shake", "swirl")


@dataclass(frozen=True)
class MotionSpec:
    kind: str  # sway | shake | swirl
    amplitude: float  # m
    frequency: float  # Hz
    duration: float  # s
    phase: float = 0.0  # rad

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.amplitude < 0 or self.frequency < 0 or self.duration <= 0:
            raise ConfigurationError("need amplitude >= 0, frequency >= 0, duration > 0")


@dataclass(frozen=True)
class ThresholdReport:
    p25: float
    p50: float
    p75: float
    p90: float
    selected: float  # = p25
    sample_count: int
    seed: int


def generate_motion(spec: MotionSpec, timestep: float, t0: float = 0.0, origin=(0.0, 0.0, 0.0)):
    """Pose samples for one canonical motion, fixed step, identity orientation.

    sway: x = A sin(2 pi f t); shake: z = A sin(2 pi f t);
    swirl: x = A cos(2 pi f t), y = A sin(2 pi f t).
    """
    n = int(round(spec.duration / timestep))
    w = 2.0 * math.pi * spec.frequency
    ox, oy, oz = origin
    poses = []
    for k in range(n + 1):
        t = k * timestep
        ph = w * t + spec.phase
        if spec.kind == "sway":
            pos = (ox + spec.amplitude * math.sin(ph), oy, oz)
        elif spec.kind == "shake":
            pos = (ox, oy, oz + spec.amplitude * math.sin(ph))
        else:  # swirl
            pos = (ox + spec.amplitude * math.cos(ph), oy + spec.amplitude * math.sin(ph), oz)
        poses.append(PoseSample(t=t0 + t, position=pos))
    return poses


def concatenate_motions(mix, timestep: float):
    """Chain motion segments into one continuous fixed-step pose stream.

    Each segment is re-anchored so its start pose coincides with the previous
    segment's end pose (no teleports between segments).
    """
    poses = []
    t0 = 0.0
    for spec in mix:
        seg = generate_motion(spec, timestep, t0=t0)
        if poses:
            delta = np.asarray(poses[-1].position) - np.asarray(seg[0].position)
            seg = [
                PoseSample(t=p.t, position=tuple(np.asarray(p.position) + delta))
                for p in seg[1:]  # drop duplicate boundary sample
            ]
        poses.extend(seg)
        t0 = poses[-1].t
    return poses


def percentile(values, q: float) -> float:
    """Linear-interpolation percentile of values at fraction q in [0, 1]."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise InputError("percentile of an empty list")
    if not 0.0 <= q <= 1.0:
        raise InputError(f"q={q} outside [0, 1]")
    return float(np.percentile(values, q * 100.0, method="linear"))


def default_mix(total_duration: float = 600.0):
    """Canonical mix: every kind x amplitude {2, 5, 10 cm} x frequency {0.3, 1, 2} Hz."""
    combos = [
        (kind, a, f)
        for kind in KINDS
        for a in (0.02, 0.05, 0.1)
        for f in (0.3, 1.0, 2.0)
    ]
    seg = total_duration / len(combos)
    return [MotionSpec(kind=k, amplitude=a, frequency=f, duration=seg) for k, a, f in combos]


def cog_accel_samples(profile, params: FluidParams, poses):
    """Per-step CoG acceleration magnitudes |p2 - 2 p1 + p0| over a pose stream."""
    sim = FluidSimulator(profile, params)
    cogs = []
    for k in range(1, len(poses) - 1):
        cogs.append(sim.advance(poses[k - 1], poses[k], poses[k + 1]).cog)
    cogs = np.asarray(cogs)
    if len(cogs) < 3:
        raise InputError("pose stream too short for acceleration samples")
    second_diff = cogs[2:] - 2.0 * cogs[1:-1] + cogs[:-2]
    return np.linalg.norm(second_diff, axis=1)


def calibrate(profile, fluid_params: FluidParams, motion_mix=None, seed: int = 0) -> ThresholdReport:
    """Run the fluid over the motion mix and report acceleration percentiles."""
    timestep = fluid_params.timestep
    if motion_mix is None:
        motion_mix = default_mix()
    total = sum(spec.duration for spec in motion_mix)
    if total < 60.0:
        raise ConfigurationError(f"motion mix duration {total} s below the 60 s floor")
    params = replace(fluid_params, seed=seed)
    poses = concatenate_motions(motion_mix, timestep)
    accel = cog_accel_samples(profile, params, poses)
    return ThresholdReport(
        p25=percentile(accel, 0.25),
        p50=percentile(accel, 0.50),
        p75=percentile(accel, 0.75),
        p90=percentile(accel, 0.90),
        selected=percentile(accel, 0.25),
        sample_count=int(accel.size),
        seed=seed,
    )
