"""Tracking controller that respects the no-sideslip constraint.

The unconstrained tracking law is a log-feedback plus feedforward twist. Its
linear part generally points off the body x axis, which the vehicle cannot
fly, so the commanded speed keeps only the forward component and the angular
command is augmented with rates that steer the nose toward the requested
direction (one yaw-plane rotation, one pitch-plane rotation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .feasibility import FormationSpec, VelocityLimits
from .lie import Pose, Twist, adjoint, compose, inverse, log_se3

# Alignment rotations collapse to the identity below this command magnitude.
ALIGN_TOL = 1e-9


@dataclass(frozen=True)
class ControlGains:
    """tracking scales the log feedback; alignment scales the nose-steering rates."""

    tracking: float = 1.0
    alignment: float = 1.0

    def __post_init__(self):
        if not (self.tracking > 0.0 and self.alignment > 0.0):
            raise ValueError("gains must be positive")


@dataclass(frozen=True)
class FollowerCommand:
    """Flyable twist plus per-tick diagnostics."""

    twist: Twist
    behind: bool = False      # requested direction pointed backward (x < 0)
    saturated: bool = False   # forward speed was clamped to the envelope
    error: np.ndarray | None = None  # tracking error coordinates at command time


def virtual_leader(leader_pose: Pose, leader_twist: Twist,
                   spec: FormationSpec) -> tuple[Pose, Twist]:
    """Pose and twist of the moving target the follower should sit on."""
    return compose(leader_pose, spec.pose), adjoint(inverse(spec.pose), leader_twist)


def tracking_error(virtual_leader_pose: Pose, follower_pose: Pose) -> np.ndarray:
    """Body-frame error coordinates (angular first), zero exactly on target."""
    return log_se3(compose(inverse(virtual_leader_pose), follower_pose)).as_vector()


def _twist_and_error(leader_pose: Pose, leader_twist: Twist, follower_pose: Pose,
                     spec: FormationSpec, gains: ControlGains) -> tuple[Twist, Twist]:
    g_lf = compose(inverse(leader_pose), follower_pose)
    err = log_se3(compose(inverse(spec.pose), g_lf))
    ff = adjoint(inverse(g_lf), leader_twist)
    k = gains.tracking
    return Twist(ff.angular - k * err.angular, ff.linear - k * err.linear), err


def tracking_twist(leader_pose: Pose, leader_twist: Twist, follower_pose: Pose,
                   spec: FormationSpec, gains: ControlGains) -> Twist:
    """Unconstrained command: log feedback toward the spec plus the leader
    feedforward. Reduces exactly to the maintenance twist at zero error."""
    return _twist_and_error(leader_pose, leader_twist, follower_pose, spec, gains)[0]


def _yaw_alignment(linear: np.ndarray) -> np.ndarray:
    """Rotation about z taking the body x axis onto the command's xy projection."""
    n = math.hypot(linear[0], linear[1])
    if n <= ALIGN_TOL:
        return np.eye(3)
    cx, cy = linear[0] / n, linear[1] / n
    # columns: projected direction, its in-plane normal, e3
    return np.array([
        [cx, -cy, 0.0],
        [cy, cx, 0.0],
        [0.0, 0.0, 1.0],
    ])


def _pitch_alignment(linear: np.ndarray) -> np.ndarray:
    """Rotation about y taking the body x axis onto the command's xz projection."""
    m = math.hypot(linear[0], linear[2])
    if m <= ALIGN_TOL:
        return np.eye(3)
    cx, cz = linear[0] / m, linear[2] / m
    # columns: projected direction, e2, direction x e2 (proper orientation)
    return np.array([
        [cx, 0.0, -cz],
        [0.0, 1.0, 0.0],
        [cz, 0.0, cx],
    ])


def alignment_rates(linear) -> np.ndarray:
    """Angular rates steering the nose toward the commanded linear direction.

    Equal to the logs of the yaw/pitch alignment rotations; the angles are read
    off with atan2 so a command exactly behind the body (angle pi) still
    returns a finite rate instead of hitting the log branch cut. Zero command
    means no steering.
    """
    linear = np.asarray(linear, dtype=float)
    Rz = _yaw_alignment(linear)
    Ry = _pitch_alignment(linear)
    yaw = math.atan2(Rz[1, 0], Rz[0, 0])
    pitch = math.atan2(Ry[0, 2], Ry[0, 0])
    return np.array([0.0, pitch, yaw])


def follower_control(leader_pose: Pose, leader_twist: Twist, follower_pose: Pose,
                     spec: FormationSpec, gains: ControlGains,
                     limits: VelocityLimits | None = None) -> FollowerCommand:
    """Flyable command: forward speed from the unconstrained law's x component,
    angular rates augmented with the alignment steering.

    A backward-pointing command is accepted but flagged. When limits are given
    the forward speed is clamped into the envelope (a fixed-wing cannot fly
    backward or below stall) and the clamp is flagged.
    """
    xi, err = _twist_and_error(leader_pose, leader_twist, follower_pose, spec, gains)
    omega = xi.angular + gains.alignment * alignment_rates(xi.linear)
    vx = float(xi.linear[0])
    behind = vx < 0.0
    saturated = False
    if limits is not None:
        clamped = min(max(vx, limits.forward_min), limits.forward_max)
        saturated = clamped != vx
        vx = clamped
    return FollowerCommand(Twist(omega, np.array([vx, 0.0, 0.0])), behind, saturated,
                           error=err.as_vector())
