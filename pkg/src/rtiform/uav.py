"""Fixed-wing UAV kinematics on SE(3).

The vehicle is a rigid body whose body-frame linear velocity is constrained to
the x axis (no sideslip, no vertical translation): four inputs remain, forward
speed and the three body angular rates. Attitude conversions use the roll ->
pitch -> yaw Euler sequence, i.e. R = Rz(psi) @ Ry(theta) @ Rx(phi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GimbalLock
from .lie import ORTHO_TOL, Pose, Twist, compose, exp_se3, project_rotation, rotation_drift

# Body-frame lateral/vertical speed above this is a constraint violation.
NONHOLONOMIC_TOL = 1e-12
# |cos(theta)| at or below this makes the Euler-rate map singular.
EULER_RATE_TOL = 1e-9
# Pitch within this of +-pi/2 folds the roll DOF into yaw on extraction.
GIMBAL_FOLD = 1e-6


@dataclass(frozen=True, slots=True)
class EulerAngles:
    """Roll, pitch, yaw in radians."""

    phi: float
    theta: float
    psi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.theta, self.psi])


@dataclass(frozen=True, slots=True)
class UavState:
    """Pose plus the twist currently being flown."""

    pose: Pose
    twist: Twist


def euler_to_rotation(angles: EulerAngles) -> np.ndarray:
    """Rotation matrix of the roll-pitch-yaw angles (Rz @ Ry @ Rx), written out."""
    cf, sf = math.cos(angles.phi), math.sin(angles.phi)
    ct, st = math.cos(angles.theta), math.sin(angles.theta)
    cp, sp = math.cos(angles.psi), math.sin(angles.psi)
    return np.array([
        [cp * ct, -sp * cf + cp * st * sf, sp * sf + cp * st * cf],
        [sp * ct, cp * cf + sp * st * sf, -cp * sf + sp * st * cf],
        [-st, ct * sf, ct * cf],
    ])


def rotation_to_euler(R) -> tuple[EulerAngles, bool]:
    """Extract roll-pitch-yaw from a rotation matrix.

    Returns (angles, degenerate). At gimbal lock (|pitch| within GIMBAL_FOLD of
    pi/2) only phi - psi or phi + psi is observable; the free DOF is folded into
    yaw, roll is reported as 0 and the degenerate flag is set. Diagnostics keep
    flowing instead of raising.
    """
    R = np.asarray(R, dtype=float)
    st = min(max(-R[2, 0], -1.0), 1.0)
    theta = math.asin(st)
    if 0.5 * math.pi - abs(theta) < GIMBAL_FOLD:
        if st > 0.0:
            psi = -math.atan2(R[0, 1], R[0, 2])
        else:
            psi = math.atan2(-R[0, 1], -R[0, 2])
        return EulerAngles(0.0, theta, psi), True
    phi = math.atan2(R[2, 1], R[2, 2])
    psi = math.atan2(R[1, 0], R[0, 0])
    return EulerAngles(phi, theta, psi), False


def euler_rates(angles: EulerAngles, omega) -> np.ndarray:
    """Euler-angle rates produced by a body angular velocity. Diagnostics only.

    Raises GimbalLock when |cos(theta)| <= EULER_RATE_TOL; the closed-loop
    controller never uses this map, so the singularity cannot stall a run.
    """
    ct = math.cos(angles.theta)
    if abs(ct) <= EULER_RATE_TOL:
        raise GimbalLock(f"cos(theta) = {ct:.3e}")
    sf, cf = math.sin(angles.phi), math.cos(angles.phi)
    tt = math.tan(angles.theta)
    E = np.array([
        [1.0, tt * sf, tt * cf],
        [0.0, cf, -sf],
        [0.0, sf / ct, cf / ct],
    ])
    return E @ np.asarray(omega, dtype=float)


def is_nonholonomic(xi: Twist, tol: float = NONHOLONOMIC_TOL) -> bool:
    """True when the twist has no body-frame lateral or vertical speed."""
    return abs(xi.linear[1]) <= tol and abs(xi.linear[2]) <= tol


def step(pose: Pose, xi: Twist, h: float) -> Pose:
    """Advance one tick holding the twist constant: pose * exp(h * xi).

    This is the exact flow for a constant twist, so a vehicle flying a fixed
    command traces its true trajectory regardless of step size. Rotations are
    re-projected onto SO(3) only if composition roundoff exceeds ORTHO_TOL.
    """
    out = compose(pose, exp_se3(xi.scaled(h)))
    if rotation_drift(out.rotation) > ORTHO_TOL:
        out = Pose(project_rotation(out.rotation), out.position)
    return out
