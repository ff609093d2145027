"""Deterministic fixed-timestep particle fluid in the vessel-local frame.

Position-based density-constraint dynamics: predict under the frame forces,
iterate a density constraint projection, smooth velocities (XSPH-style), and
clamp every particle into the vessel. Vessel motion enters purely through the
translational inertial force -a_vessel and gravity rotated into the local
frame; rotational pseudo-forces are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from sloshpulse.errors import ConfigurationError, InputError, SimulationFault
from sloshpulse.motion import PoseSample, check_unit_quaternion, rotate_world_to_local
from sloshpulse.vessel import VesselProfile, profile_radius

DEFAULT_TIMESTEP = 1.0 / 90.0

# Constraint-solver internals: successive over/under-relaxation factor and the
# regularizer in the lambda denominator. Tuned for settling stability.
_RELAXATION = 0.5
_CONSTRAINT_EPS = 1e-6


@dataclass(frozen=True)
class FluidParams:
    particle_count: int = 300
    particle_mass: float = 2.16e-4  # kg, water density x rest_spacing^3
    rest_spacing: float = 0.006
    smoothing_radius: float = 0.012
    viscosity_coeff: float = 0.05
    constraint_iterations: int = 3
    timestep: float = DEFAULT_TIMESTEP
    gravity: float = 9.81
    seed: int = 0

    def __post_init__(self):
        if self.particle_count < 1:
            raise ConfigurationError("particle_count must be >= 1")
        if self.timestep <= 0:
            raise ConfigurationError("timestep must be positive")
        if self.constraint_iterations < 1:
            raise ConfigurationError("constraint_iterations must be >= 1")
        if self.smoothing_radius <= self.rest_spacing:
            raise ConfigurationError("smoothing_radius must exceed rest_spacing")
        if self.viscosity_coeff < 0:
            raise ConfigurationError("viscosity_coeff must be >= 0")

    @property
    def rest_density(self) -> float:
        return self.particle_mass / self.rest_spacing**3


@dataclass(frozen=True)
class FluidState:
    positions: np.ndarray  # (N, 3) vessel-local, meters
    velocities: np.ndarray  # (N, 3) m/s
    step_index: int = 0


@dataclass(frozen=True)
class CoGSample:
    t: float
    cog: np.ndarray  # (3,) vessel-local, meters


def _project_into_vessel(profile: VesselProfile, pos: np.ndarray):
    """Vectorized clamp of positions into the vessel.

    Returns (clamped, normals, corrected_mask); normals are the unit directions
    the clamped particles were moved along (zero rows where uncorrected).
    """
    out = pos.copy()
    out[:, 2] = np.clip(out[:, 2], 0.0, profile.height)
    r_max = np.interp(out[:, 2], profile.knot_z, profile.knot_r)
    r = np.hypot(out[:, 0], out[:, 1])
    over = r > r_max
    if np.any(over):
        scale = np.ones_like(r)
        nz = over & (r > 0.0)
        scale[nz] = r_max[nz] / r[nz]
        out[:, 0] *= scale
        out[:, 1] *= scale
        degen = over & (r == 0.0)
        if np.any(degen):
            out[degen, 0] = r_max[degen]  # deterministic +x for on-axis clamps
    delta = out - pos
    dist = np.sqrt(np.einsum("ij,ij->i", delta, delta))
    corrected = dist > 0.0
    normals = np.zeros_like(pos)
    normals[corrected] = delta[corrected] / dist[corrected, None]
    return out, normals, corrected


# Fraction of the (normalized) poly6 kernel mass lying beyond a plane at
# signed distance b = u*h from the kernel center. Used to compensate the
# density deficit of particles near the floor and wall, treating the solid
# boundary as rest-density material.
def _halfspace_fraction(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, -1.0, 1.0)
    g = (
        u
        - (4.0 / 3.0) * u**3
        + (6.0 / 5.0) * u**5
        - (4.0 / 7.0) * u**7
        + (1.0 / 9.0) * u**9
    )
    return (315.0 / 256.0) * (128.0 / 315.0 - g)


def _halfspace_fraction_deriv(u: np.ndarray) -> np.ndarray:
    """d/du of _halfspace_fraction (multiply by 1/h for the spatial gradient)."""
    u = np.clip(u, -1.0, 1.0)
    return -(315.0 / 256.0) * (1.0 - u * u) ** 4


def _scatter_pairs(n, i, j, values):
    """Antisymmetric pair scatter: out[i] += values, out[j] -= values."""
    if values.ndim == 1:
        return np.bincount(i, weights=values, minlength=n) - np.bincount(
            j, weights=values, minlength=n
        )
    out = np.empty((n, values.shape[1]))
    for c in range(values.shape[1]):
        out[:, c] = np.bincount(i, weights=values[:, c], minlength=n) - np.bincount(
            j, weights=values[:, c], minlength=n
        )
    return out


def _scatter_pairs_sym(n, i, j, values):
    """Symmetric pair scatter: out[i] += values, out[j] += values."""
    return np.bincount(i, weights=values, minlength=n) + np.bincount(
        j, weights=values, minlength=n
    )


def spawn(profile: VesselProfile, params: FluidParams) -> FluidState:
    """Seed particles on a jittered cubic lattice at the vessel bottom."""
    s = params.rest_spacing
    margin = 0.5 * s
    points = []
    layer = 0
    while len(points) < params.particle_count:
        z = margin + layer * s
        if z > profile.height - margin:
            raise ConfigurationError(
                f"{params.particle_count} particles at spacing {s} do not fit in "
                f"vessel {profile.name!r}"
            )
        r_allow = profile_radius(profile, z) - margin
        if r_allow >= 0.0:
            n_side = int(r_allow // s)
            coords = np.arange(-n_side, n_side + 1) * s
            # fill each layer center-out so partial layers stay axisymmetric
            cells = sorted(
                ((x, y) for y in coords for x in coords if math.hypot(x, y) <= r_allow),
                key=lambda c: (math.hypot(c[0], c[1]), c[0], c[1]),
            )
            for x, y in cells:
                points.append((x, y, z))
                if len(points) == params.particle_count:
                    break
        layer += 1
    pos = np.array(points[: params.particle_count], dtype=float).reshape(-1, 3)
    rng = np.random.default_rng(params.seed)
    pos += rng.uniform(-0.05 * s, 0.05 * s, size=pos.shape)
    pos, _, _ = _project_into_vessel(profile, pos)
    return FluidState(positions=pos, velocities=np.zeros_like(pos), step_index=0)


def step(
    state: FluidState,
    params: FluidParams,
    profile: VesselProfile,
    frame_accel,
    frame_gravity_local,
) -> FluidState:
    """Advance one fixed timestep under the given frame drive."""
    dt = params.timestep
    h = params.smoothing_radius
    m = params.particle_mass
    rho0 = params.rest_density
    x = state.positions
    v = state.velocities

    g_eff = np.asarray(frame_gravity_local, dtype=float) - np.asarray(frame_accel, dtype=float)
    v_pred = v + dt * g_eff
    p = x + dt * v_pred
    p, _, _ = _project_into_vessel(profile, p)

    # Fixed neighbor list for all constraint iterations of this step.
    pairs = cKDTree(p).query_pairs(h, output_type="ndarray")
    n = len(x)

    poly6_c = 315.0 / (64.0 * math.pi * h**9)
    spiky_c = -45.0 / (math.pi * h**6)
    w_self = poly6_c * h**6  # poly6 at r=0
    mass_over_rho0 = m / rho0
    eps = _CONSTRAINT_EPS
    pi, pj = (pairs[:, 0], pairs[:, 1]) if len(pairs) else (None, None)

    for _ in range(params.constraint_iterations):
        # Boundary density compensation: floor below and wall beside each
        # particle contribute kernel mass as if filled at rest density.
        z_here = p[:, 2]
        r_wall = np.interp(z_here, profile.knot_z, profile.knot_r)
        r_xy = np.hypot(p[:, 0], p[:, 1])
        u_floor = z_here / h
        u_wall = (r_wall - r_xy) / h
        rho = np.full(n, m * w_self)
        rho += rho0 * (_halfspace_fraction(u_floor) + _halfspace_fraction(u_wall))
        # Scaled constraint gradients from those planar boundary terms.
        gb_floor = _halfspace_fraction_deriv(u_floor) / h  # along +z
        gb_wall_mag = -_halfspace_fraction_deriv(u_wall) / h  # along +r_hat
        r_xy_safe = np.maximum(r_xy, 1e-12)
        bgrad = np.empty((n, 3))
        bgrad[:, 0] = gb_wall_mag * p[:, 0] / r_xy_safe
        bgrad[:, 1] = gb_wall_mag * p[:, 1] / r_xy_safe
        bgrad[:, 2] = gb_floor

        if pi is not None:
            d = p[pi] - p[pj]
            r2 = np.einsum("ij,ij->i", d, d)
            inside = r2 < h * h
            i, j, d = pi[inside], pj[inside], d[inside]
            r = np.sqrt(r2[inside])
            hh = h * h - r * r
            w = poly6_c * hh * hh * hh
            rho += m * _scatter_pairs_sym(n, i, j, w)
            # Spiky gradient w.r.t. the first pair member, guarded at r=0.
            gmag = spiky_c * (h - r) ** 2 / np.maximum(r, 1e-12)
            grad = d * gmag[:, None]
            sumgrad = _scatter_pairs(n, i, j, grad) * mass_over_rho0 + bgrad
            pair_gsq = np.einsum("ij,ij->i", grad, grad) * mass_over_rho0**2
            gradsq = _scatter_pairs_sym(n, i, j, pair_gsq)
        else:
            i = j = grad = None
            sumgrad = bgrad
            gradsq = np.zeros(n)

        c_vals = np.maximum(rho / rho0 - 1.0, 0.0)
        denom = np.einsum("ij,ij->i", sumgrad, sumgrad) + gradsq
        lam = -c_vals / (denom + eps)
        dp = lam[:, None] * bgrad
        if i is not None:
            coeff = (lam[i] + lam[j])[:, None] * grad * mass_over_rho0
            dp += _scatter_pairs(n, i, j, coeff)
        p = p + _RELAXATION * dp
        p, _, _ = _project_into_vessel(profile, p)

    v_new = (p - x) / dt

    # XSPH velocity smoothing scaled by the viscosity dial.
    if params.viscosity_coeff > 0.0 and len(pairs):
        i, j = pairs[:, 0], pairs[:, 1]
        d = p[i] - p[j]
        r2 = np.einsum("ij,ij->i", d, d)
        inside = r2 < h * h
        i, j, r2 = i[inside], j[inside], r2[inside]
        hh = h * h - r2
        w = poly6_c * hh * hh * hh
        dv = (v_new[j] - v_new[i]) * (w * mass_over_rho0)[:, None]
        v_new = v_new + params.viscosity_coeff * _scatter_pairs(n, i, j, dv)

    # Bulk dissipation from the same viscosity dial; without it the position
    # corrections keep re-injecting kinetic energy and the fluid never settles.
    if params.viscosity_coeff > 0.0:
        v_new = v_new * max(0.0, 1.0 - 0.2 * params.viscosity_coeff)

    # Final containment clamp; kill the velocity component along each clamp normal.
    p, normals, corrected = _project_into_vessel(profile, p)
    if np.any(corrected):
        vn = np.einsum("ij,ij->i", v_new, normals)
        push_out = corrected & (vn < 0.0)
        v_new = v_new - np.where(push_out, vn, 0.0)[:, None] * normals

    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v_new))):
        raise SimulationFault("non-finite particle state", step_index=state.step_index + 1)

    return FluidState(positions=p, velocities=v_new, step_index=state.step_index + 1)


def center_of_gravity(state: FluidState) -> np.ndarray:
    """Equal-mass center of gravity: arithmetic mean of particle positions."""
    return state.positions.mean(axis=0)


def world_to_local_drive(
    pose_prev: PoseSample,
    pose_curr: PoseSample,
    pose_next: PoseSample,
    timestep: float,
    gravity: float = 9.81,
):
    """Frame drive terms from three consecutive poses at a fixed timestep.

    Returns (frame_accel, frame_gravity_local), both expressed in the vessel
    frame of pose_curr. frame_accel is the second central difference of the
    world positions.
    """
    q = check_unit_quaternion(pose_curr.orientation)
    for other in (pose_prev.orientation, pose_next.orientation):
        check_unit_quaternion(other)
    p0 = np.asarray(pose_prev.position, dtype=float)
    p1 = np.asarray(pose_curr.position, dtype=float)
    p2 = np.asarray(pose_next.position, dtype=float)
    a_world = (p2 - 2.0 * p1 + p0) / timestep**2
    frame_accel = rotate_world_to_local(q, a_world)
    frame_gravity = rotate_world_to_local(q, np.array([0.0, 0.0, -gravity]))
    return frame_accel, frame_gravity


class FluidSimulator:
    """Stateful driver: spawn once, then advance one step per pose triple."""

    def __init__(self, profile: VesselProfile, params: FluidParams):
        self.profile = profile
        self.params = params
        self.state = spawn(profile, params)

    def advance(self, pose_prev, pose_curr, pose_next) -> CoGSample:
        accel, grav = world_to_local_drive(
            pose_prev, pose_curr, pose_next, self.params.timestep, self.params.gravity
        )
        self.state = step(self.state, self.params, self.profile, accel, grav)
        return CoGSample(t=pose_next.t, cog=center_of_gravity(self.state))


def simulate_trace(profile: VesselProfile, params: FluidParams, poses) -> list:
    """Run the solver over a pose stream, returning the per-step CoG trace."""
    if len(poses) < 3:
        raise InputError("need at least three pose samples")
    sim = FluidSimulator(profile, params)
    return [
        sim.advance(poses[k - 1], poses[k], poses[k + 1]) for k in range(1, len(poses) - 1)
    ]
