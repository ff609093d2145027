"""Vessel pose streams and the quaternion math that rotates world vectors into the local frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sloshpulse.errors import InputError

IDENTITY_QUAT = (1.0, 0.0, 0.0, 0.0)  # (w, x, y, z)


@dataclass(frozen=True)
class PoseSample:
    """One timestamped vessel pose in the world frame."""

    t: float
    position: tuple  # (x, y, z) meters
    orientation: tuple = IDENTITY_QUAT  # unit quaternion (w, x, y, z)


def check_unit_quaternion(q, tol: float = 1e-6):
    q = np.asarray(q, dtype=float)
    norm = float(np.linalg.norm(q))
    if abs(norm - 1.0) > tol:
        raise InputError(f"quaternion norm {norm} deviates from 1 by more than {tol}")
    return q


def quat_conjugate(q):
    w, x, y, z = q
    return np.array([w, -x, -y, -z])


def quat_rotate(q, v):
    """Rotate vector v by unit quaternion q = (w, x, y, z)."""
    w = q[0]
    u = np.asarray(q[1:], dtype=float)
    v = np.asarray(v, dtype=float)
    # v' = v + 2u x (u x v + w v)
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def rotate_world_to_local(q, v):
    """Express world-frame vector v in the body frame of orientation q."""
    return quat_rotate(quat_conjugate(q), v)
