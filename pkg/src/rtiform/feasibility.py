"""Which rigid formations a fixed-wing follower can actually hold.

A follower rigidly offset from its (virtual) parent must fly the parent's
motion seen from its own frame. That velocity is only flyable if it points
along the follower's body x axis, which pins pitch and yaw (roll stays free)
and fixes the forward speed to the magnitude of the offset-point velocity.
This module synthesizes those attitudes, checks the constraint residual, and
sizes formations against velocity envelopes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HoverRequired
from .lie import Pose, Twist, _cross, adjoint, inverse
from .uav import EulerAngles, euler_to_rotation

# Residual tolerance for attitudes this module synthesizes.
SYNTHESIS_TOL = 1e-10
# Residual tolerance for user-supplied attitudes (validation mode).
VALIDATION_TOL = 1e-9

RTI = "RTI"
P_RTI = "P-RTI"


@dataclass(frozen=True)
class VelocityLimits:
    """Angular-rate cap and forward-speed envelope (all positive)."""

    angular_cap: float
    forward_min: float
    forward_max: float

    def __post_init__(self):
        if not self.angular_cap > 0.0:
            raise ValueError("angular cap must be positive")
        if not 0.0 < self.forward_min < self.forward_max:
            raise ValueError("need 0 < forward_min < forward_max")


def validate_limit_pairing(leader: VelocityLimits, follower: VelocityLimits) -> None:
    """Followers share the leader's angular cap and strictly contain its speed band."""
    if follower.angular_cap != leader.angular_cap:
        raise ValueError("leader and follower angular caps must match")
    if not (follower.forward_min < leader.forward_min
            and leader.forward_max < follower.forward_max):
        raise ValueError("follower speed band must strictly contain the leader's")


@dataclass(frozen=True)
class FormationSpec:
    """Desired relative pose of a follower: offset, attitude, and pattern kind.

    ``rotation`` is derived from ``angles`` at construction so the two can
    never drift apart.
    """

    offset: np.ndarray
    angles: EulerAngles
    kind: str = RTI
    rotation: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))
        if self.kind not in (RTI, P_RTI):
            raise ValueError(f"unknown formation kind {self.kind!r}")
        object.__setattr__(self, "rotation", euler_to_rotation(self.angles))

    @property
    def pose(self) -> Pose:
        return Pose(self.rotation, self.offset)


def offset_velocity(leader_twist: Twist, offset) -> np.ndarray:
    """Velocity of a rigidly attached offset point, in the leader's frame.

    This is what a follower parked at ``offset`` must fly. Raises
    HoverRequired when it is exactly zero: a fixed-wing cannot hold a point
    with no velocity.
    """
    offset = np.asarray(offset, dtype=float)
    tau = _cross(leader_twist.angular, offset) + leader_twist.linear
    if not tau.any():
        raise HoverRequired(f"offset {offset} has zero velocity in the leader frame")
    return tau


def synthesize_attitude(tau, roll: float = 0.0) -> EulerAngles:
    """Pitch and yaw that point the body x axis along tau; roll is free.

    atan2 picks the branch with positive forward speed: the body-frame
    velocity of the result is exactly (||tau||, 0, 0).
    """
    tau = np.asarray(tau, dtype=float)
    psi = math.atan2(tau[1], tau[0])
    theta = math.atan2(-tau[2], math.hypot(tau[0], tau[1]))
    return EulerAngles(roll, theta, psi)


def synthesize_spec(leader_twist: Twist, offset, roll: float = 0.0,
                    kind: str = RTI) -> FormationSpec:
    """FormationSpec with the attitude synthesized for the given leader twist."""
    angles = synthesize_attitude(offset_velocity(leader_twist, offset), roll)
    return FormationSpec(np.asarray(offset, dtype=float), angles, kind)


def maintenance_velocity(spec: FormationSpec, leader_twist: Twist) -> Twist:
    """Twist the follower must fly to hold the spec: the leader twist seen
    through the relative pose."""
    return adjoint(inverse(spec.pose), leader_twist)


def nonholonomic_residual(spec: FormationSpec, leader_twist: Twist) -> float:
    """Lateral/vertical speed the spec would demand; 0 means flyable."""
    v = maintenance_velocity(spec, leader_twist).linear
    return max(abs(float(v[1])), abs(float(v[2])))


def formation_kind(time_varying: bool) -> str:
    """Constant leader twists give rigid patterns (RTI); time-varying ones are
    re-synthesized each tick (P-RTI)."""
    return P_RTI if time_varying else RTI


def identity_attitude_feasible(leader_twist: Twist, offset, tol: float = 1e-12) -> bool:
    """Can the follower keep the parent's attitude? Yes iff the leader does not
    rotate, or it does not roll and the offset has no forward component."""
    w = leader_twist.angular
    offset = np.asarray(offset, dtype=float)
    if max(abs(float(w[0])), abs(float(w[1])), abs(float(w[2]))) <= tol:
        return True
    return abs(float(w[0])) <= tol and abs(float(offset[0])) <= tol


def max_offset_norm(leader: VelocityLimits, follower: VelocityLimits,
                    leader_turns: bool) -> float:
    """Largest offset radius the speed envelopes can sustain.

    Unbounded (math.inf) when the leader never turns; otherwise the follower's
    slack above and below the leader's band, divided by the angular cap.
    """
    validate_limit_pairing(leader, follower)
    if not leader_turns:
        return math.inf
    return min(
        (follower.forward_max - leader.forward_max) / leader.angular_cap,
        (leader.forward_min - follower.forward_min) / leader.angular_cap,
    )


@dataclass(frozen=True)
class SaturationReport:
    """Steady-state demand of a spec against a follower's limits."""

    angular_rate: float
    angular_cap: float
    forward_speed: float
    forward_min: float
    forward_max: float

    # closed intervals: demands sitting exactly on a limit are admissible, so
    # leave a relative ulp margin rather than failing on rounding noise
    @property
    def angular_ok(self) -> bool:
        return self.angular_rate <= self.angular_cap * (1.0 + 1e-12)

    @property
    def forward_ok(self) -> bool:
        return (self.forward_min * (1.0 - 1e-12)
                <= self.forward_speed
                <= self.forward_max * (1.0 + 1e-12))

    @property
    def ok(self) -> bool:
        return self.angular_ok and self.forward_ok


def check_saturation(spec: FormationSpec, leader_twist: Twist,
                     follower_limits: VelocityLimits) -> SaturationReport:
    """Compare the spec's maintenance demand with the follower's envelope.

    The attitude rotation preserves norms, so the angular demand equals the
    leader's rate and the forward demand equals the offset-point speed.
    """
    w = leader_twist.angular
    tau = _cross(w, spec.offset) + leader_twist.linear
    return SaturationReport(
        angular_rate=float(math.sqrt(w @ w)),
        angular_cap=follower_limits.angular_cap,
        forward_speed=float(math.sqrt(tau @ tau)),
        forward_min=follower_limits.forward_min,
        forward_max=follower_limits.forward_max,
    )
