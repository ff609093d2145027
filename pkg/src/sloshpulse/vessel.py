"""Axisymmetric vessel geometry, containment queries, and actuator/anchor placement.

A vessel is described by a piecewise-linear radius-vs-height profile in its
local frame: z axis up, z=0 at the inner floor. All lengths in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from sloshpulse.errors import ConfigurationError, InputError

SUPPORTED_MOTOR_COUNTS = (4, 6, 8)


@dataclass(frozen=True)
class VesselProfile:
    """Container geometry as an ordered list of (z, radius) knots."""

    name: str
    height: float
    knots: tuple  # ((z, radius), ...) sorted strictly increasing in z
    shell_thickness: float = 0.002  # metadata only, no physics

    def __post_init__(self):
        knots = tuple((float(z), float(r)) for z, r in self.knots)
        object.__setattr__(self, "knots", knots)
        if self.height <= 0:
            raise ConfigurationError(f"vessel height must be positive, got {self.height}")
        if len(knots) < 2:
            raise ConfigurationError("profile needs at least two knots")
        zs = [z for z, _ in knots]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise ConfigurationError("knot heights must be strictly increasing")
        if zs[0] != 0.0 or abs(zs[-1] - self.height) > 1e-12:
            raise ConfigurationError("knots must span exactly [0, height]")
        if any(r <= 0 for _, r in knots):
            raise ConfigurationError("all knot radii must be positive")

    def radius(self, z: float) -> float:
        return profile_radius(self, z)

    @property
    def knot_z(self) -> np.ndarray:
        return np.array([z for z, _ in self.knots])

    @property
    def knot_r(self) -> np.ndarray:
        return np.array([r for _, r in self.knots])


@dataclass(frozen=True)
class ActuatorLayout:
    """Motor ring plus matching trigger anchors, one anchor per motor.

    Motor k sits at azimuth 2*pi*k/motor_count on the vessel wall at
    ring_height; its anchor shares the azimuth at anchor_height.
    """

    motor_count: int
    ring_height: float
    anchor_height: float
    motor_positions: np.ndarray  # (N, 3)
    anchor_positions: np.ndarray  # (N, 3)
    mounting: str = "inside"  # metadata flag, no behavioral effect


def profile_radius(profile: VesselProfile, z: float) -> float:
    """Piecewise-linear interpolated inner radius at height z."""
    if not 0.0 <= z <= profile.height:
        raise InputError(f"z={z} outside vessel range [0, {profile.height}]")
    return float(np.interp(z, profile.knot_z, profile.knot_r))


def contains(profile: VesselProfile, p, slack: float = 0.0) -> bool:
    """True iff p lies inside the vessel (axial range and radial bound)."""
    x, y, z = p
    if not -slack <= z <= profile.height + slack:
        return False
    zc = min(max(z, 0.0), profile.height)
    return math.hypot(x, y) <= profile_radius(profile, zc) + slack


def project_to_boundary(profile: VesselProfile, p):
    """Clamp p into the vessel: axial clamp to [0, height], radial clamp to radius(z).

    Returns (point, normal, corrected). normal is the unit direction the point
    was moved along (the inward normal of the clamp); zero vector when p was
    already inside. A degenerate on-axis radial clamp uses +x for determinism.
    """
    x, y, z = float(p[0]), float(p[1]), float(p[2])
    zc = min(max(z, 0.0), profile.height)
    r_max = profile_radius(profile, zc)
    r = math.hypot(x, y)
    if r > r_max:
        if r > 0.0:
            s = r_max / r
            xc, yc = x * s, y * s
        else:
            xc, yc = r_max, 0.0  # degenerate: fixed +x direction
    else:
        xc, yc = x, y
    point = np.array([xc, yc, zc])
    delta = point - np.array([x, y, z])
    norm = float(np.linalg.norm(delta))
    if norm == 0.0:
        return point, np.zeros(3), False
    return point, delta / norm, True


def layout_actuators(
    profile: VesselProfile,
    motor_count: int,
    ring_height: float = 0.040,
    anchor_height: float = 0.020,
    mounting: str = "inside",
) -> ActuatorLayout:
    """Place motor_count motors on the wall at ring_height and anchors at anchor_height."""
    if motor_count not in SUPPORTED_MOTOR_COUNTS:
        raise ConfigurationError(
            f"motor_count must be one of {SUPPORTED_MOTOR_COUNTS}, got {motor_count}"
        )
    for h, label in ((ring_height, "ring_height"), (anchor_height, "anchor_height")):
        if not 0.0 <= h <= profile.height:
            raise ConfigurationError(f"{label}={h} outside vessel range [0, {profile.height}]")
    r_ring = profile_radius(profile, ring_height)
    r_anchor = profile_radius(profile, anchor_height)
    az = 2.0 * math.pi * np.arange(motor_count) / motor_count
    motors = np.stack(
        [r_ring * np.cos(az), r_ring * np.sin(az), np.full(motor_count, ring_height)], axis=1
    )
    anchors = np.stack(
        [r_anchor * np.cos(az), r_anchor * np.sin(az), np.full(motor_count, anchor_height)],
        axis=1,
    )
    return ActuatorLayout(
        motor_count=motor_count,
        ring_height=ring_height,
        anchor_height=anchor_height,
        motor_positions=motors,
        anchor_positions=anchors,
        mounting=mounting,
    )


# Built-in profiles: cylindrical beaker, conical erlen taper, and a florence
# flask approximated as two linear segments with its widest radius at mid height.
_BUILTINS = {
    "beaker": dict(height=0.165, knots=((0.0, 0.0625), (0.165, 0.0625))),
    "erlen": dict(height=0.165, knots=((0.0, 0.0625), (0.165, 0.020))),
    "florence": dict(height=0.165, knots=((0.0, 0.0625), (0.0825, 0.080), (0.165, 0.020))),
}


def builtin_profile(name: str) -> VesselProfile:
    try:
        spec = _BUILTINS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown vessel {name!r}; built-ins: {sorted(_BUILTINS)}"
        ) from None
    return VesselProfile(name=name, **spec)


def builtin_names():
    return sorted(_BUILTINS)


def load_profile(path) -> VesselProfile:
    """Read a vessel profile from a text file.

    Format, one directive per line (# comments allowed)::

        name erlen
        height 0.165
        knot 0.0 0.0625
        knot 0.165 0.020
    """
    name = None
    height = None
    knots = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "name" and len(parts) == 2:
                    name = parts[1]
                elif parts[0] == "height" and len(parts) == 2:
                    height = float(parts[1])
                elif parts[0] == "knot" and len(parts) == 3:
                    knots.append((float(parts[1]), float(parts[2])))
                else:
                    raise ValueError
            except ValueError:
                raise ConfigurationError(
                    f"{path}:{lineno}: bad profile line {raw.strip()!r}"
                ) from None
    if name is None or height is None or not knots:
        raise ConfigurationError(f"{path}: profile needs name, height, and knot lines")
    return VesselProfile(name=name, height=height, knots=tuple(knots))
