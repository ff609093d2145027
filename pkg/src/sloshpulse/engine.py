"""Haptic event engine: folds a CoG trace into timed vibrotactile pulse commands.

Two trigger paths:
  * proximity: the CoG comes within distance_threshold of a motor's anchor
    while its per-step acceleration exceeds accel_threshold (both strict);
  * vertical: the CoG z travels above the high band and back below the low
    band within a time window, firing every motor simultaneously.
Pulses last pulse_duration ms; a motor already mid-pulse ignores retriggers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sloshpulse.errors import ConfigurationError, InputError
from sloshpulse.vessel import ActuatorLayout

CAUSE_PROXIMITY = "proximity"
CAUSE_VERTICAL = "vertical"


@dataclass(frozen=True)
class TriggerConfig:
    distance_threshold: float = 0.01  # m
    accel_threshold: float = 1e-5  # m/step^2, default from calibration
    pulse_duration_ms: float = 80.0
    pulse_strength: int = 255  # PWM 0-255
    vertical_low_frac: float = 0.25
    vertical_high_frac: float = 0.75
    vertical_window: float = 1.0  # s
    # retrigger policy is fixed: ignore-while-active

    def __post_init__(self):
        if self.distance_threshold <= 0:
            raise ConfigurationError("distance_threshold must be positive")
        if self.accel_threshold < 0:
            raise ConfigurationError("accel_threshold must be >= 0")
        if not 0 <= self.vertical_low_frac < self.vertical_high_frac <= 1:
            raise ConfigurationError("need 0 <= vertical_low_frac < vertical_high_frac <= 1")
        if not 0 <= self.pulse_strength <= 255:
            raise ConfigurationError("pulse_strength must be in [0, 255]")


@dataclass(frozen=True)
class PulseCommand:
    t_start: float  # s
    motor: int
    duration_ms: float
    strength: int
    cause: str  # proximity | vertical


@dataclass
class EngineState:
    """Mutable per-session trigger state."""

    motor_count: int
    active_until: dict = field(default_factory=dict)  # motor -> expiry time (s)
    vertical_phase: str = "idle"  # idle | rose
    vertical_entry_t: float = 0.0

    def is_active(self, motor: int, t: float) -> bool:
        return self.active_until.get(motor, -np.inf) > t


def cog_acceleration(history, timestep: float) -> float:
    """Per-step^2 acceleration magnitude |p2 - 2 p1 + p0| of three CoG samples."""
    if len(history) != 3:
        raise InputError("need exactly three consecutive CoG samples")
    s0, s1, s2 = history
    for a, b in ((s0, s1), (s1, s2)):
        if abs((b.t - a.t) - timestep) > 1e-6:
            raise InputError(
                f"CoG samples not at fixed step {timestep}: {a.t} -> {b.t}"
            )
    p0, p1, p2 = (np.asarray(s.cog, dtype=float) for s in history)
    return float(np.linalg.norm(p2 - 2.0 * p1 + p0))


def proximity_triggers(cog, accel: float, layout: ActuatorLayout, cfg: TriggerConfig):
    """Motors whose anchor lies strictly within distance_threshold of the CoG,
    gated on accel strictly above threshold."""
    if not accel > cfg.accel_threshold:
        return set()
    d = np.linalg.norm(layout.anchor_positions - np.asarray(cog, dtype=float), axis=1)
    return set(int(k) for k in np.nonzero(d < cfg.distance_threshold)[0])


def vertical_shake_detect(
    state: EngineState, cog_sample, fill_height: float, cfg: TriggerConfig
) -> bool:
    """Two-phase band-crossing detector for a bottom-to-top-and-back CoG excursion.

    Mutates state. Returns True on the step the CoG drops back below the low
    band within the window of its high-band entry.
    """
    if fill_height <= 0:
        raise InputError("fill_height must be positive")
    z = float(np.asarray(cog_sample.cog)[2])
    t = cog_sample.t
    high = cfg.vertical_high_frac * fill_height
    low = cfg.vertical_low_frac * fill_height
    if state.vertical_phase == "rose" and t - state.vertical_entry_t > cfg.vertical_window:
        state.vertical_phase = "idle"
    if state.vertical_phase == "idle":
        if z > high:
            state.vertical_phase = "rose"
            state.vertical_entry_t = t
        return False
    if z < low:
        state.vertical_phase = "idle"
        return True
    return False


def schedule(t: float, motors, cause: str, state: EngineState, cfg: TriggerConfig):
    """Emit one pulse per requested motor not currently mid-pulse. Mutates state."""
    commands = []
    for motor in sorted(motors):
        if state.is_active(motor, t):
            continue
        commands.append(
            PulseCommand(
                t_start=t,
                motor=motor,
                duration_ms=cfg.pulse_duration_ms,
                strength=cfg.pulse_strength,
                cause=cause,
            )
        )
        state.active_until[motor] = t + cfg.pulse_duration_ms / 1000.0
    return commands


def run_engine(cog_trace, layout: ActuatorLayout, cfg: TriggerConfig, fill_height: float):
    """Fold the full trigger pipeline over a fixed-step CoG trace."""
    if len(cog_trace) < 3:
        return []
    timestep = cog_trace[1].t - cog_trace[0].t
    state = EngineState(motor_count=layout.motor_count)
    commands = []
    for k in range(2, len(cog_trace)):
        sample = cog_trace[k]
        accel = cog_acceleration(cog_trace[k - 2 : k + 1], timestep)
        # Vertical burst first: an all-motor event; simultaneous proximity
        # triggers are then absorbed by ignore-while-active.
        if vertical_shake_detect(state, sample, fill_height, cfg):
            commands.extend(
                schedule(sample.t, range(layout.motor_count), CAUSE_VERTICAL, state, cfg)
            )
        hits = proximity_triggers(sample.cog, accel, layout, cfg)
        if hits:
            commands.extend(schedule(sample.t, hits, CAUSE_PROXIMITY, state, cfg))
    commands.sort(key=lambda c: (c.t_start, c.motor))
    return commands
