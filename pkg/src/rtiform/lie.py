"""Rigid-body math on SO(3) and SE(3).

Conventions used throughout the package:

* a pose ``(R, p)`` maps body coordinates ``b`` to world coordinates ``R @ b + p``;
* a twist pairs a body-frame angular rate with a body-frame linear velocity;
* ``exp``/``log`` use the axis-angle closed forms with a series switch below
  ``SMALL_ANGLE`` so no coefficient is ever evaluated at 0/0;
* the rotation log refuses inputs at angle pi instead of silently picking a
  branch (``NearPiSingularity``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearPiSingularity, NotSkew

# Below this rotation angle exp/log switch to truncated Taylor series.
SMALL_ANGLE = 1e-8
# Maximum Frobenius asymmetry accepted by vee3.
SKEW_TOL = 1e-9
# trace(R) <= -1 + TRACE_PI_TOL means the rotation angle is numerically pi.
TRACE_PI_TOL = 1e-9
# Orthonormality drift that triggers re-projection after composition chains.
ORTHO_TOL = 1e-9

_EYE3 = np.eye(3)


@dataclass(frozen=True, slots=True)
class Twist:
    """Body-frame velocity: angular rate and linear velocity, both 3-vectors."""

    angular: np.ndarray
    linear: np.ndarray

    @staticmethod
    def zero() -> "Twist":
        return Twist(np.zeros(3), np.zeros(3))

    @staticmethod
    def from_vector(x) -> "Twist":
        x = np.asarray(x, dtype=float)
        return Twist(x[:3].copy(), x[3:6].copy())

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.angular, self.linear])

    def scaled(self, s: float) -> "Twist":
        return Twist(s * self.angular, s * self.linear)

    def matrix(self) -> np.ndarray:
        """4x4 matrix form: [[hat(w), v], [0, 0]]."""
        m = np.zeros((4, 4))
        m[:3, :3] = hat3(self.angular)
        m[:3, 3] = self.linear
        return m


@dataclass(frozen=True, slots=True)
class Pose:
    """Element of SE(3): rotation matrix and position."""

    rotation: np.ndarray
    position: np.ndarray

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.eye(3), np.zeros(3))

    @staticmethod
    def from_matrix(m) -> "Pose":
        m = np.asarray(m, dtype=float)
        return Pose(m[:3, :3].copy(), m[:3, 3].copy())

    def matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.position
        return m


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


def hat3(w) -> np.ndarray:
    """Skew matrix of a 3-vector: hat3(w) @ b == cross(w, b)."""
    return np.array([
        [0.0, -w[2], w[1]],
        [w[2], 0.0, -w[0]],
        [-w[1], w[0], 0.0],
    ])


def vee3(S) -> np.ndarray:
    """Inverse of hat3. Rejects matrices that are not skew within SKEW_TOL."""
    S = np.asarray(S, dtype=float)
    if np.linalg.norm(S + S.T) > SKEW_TOL:
        raise NotSkew(f"asymmetry {np.linalg.norm(S + S.T):.3e} exceeds {SKEW_TOL:.0e}")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def exp_so3(w) -> np.ndarray:
    """Rodrigues exponential of an axis-angle vector."""
    w = np.asarray(w, dtype=float)
    theta = math.sqrt(w @ w)
    K = hat3(w)
    if theta < SMALL_ANGLE:
        return _EYE3 + K + 0.5 * (K @ K)
    # 1 - cos as 2 sin^2(theta/2): no cancellation for small theta.
    a = math.sin(theta) / theta
    b = 2.0 * math.sin(0.5 * theta) ** 2 / (theta * theta)
    return _EYE3 + a * K + b * (K @ K)


def log_so3(R) -> np.ndarray:
    """Axis-angle vector of a rotation matrix, norm in [0, pi).

    Raises NearPiSingularity when trace(R) <= -1 + TRACE_PI_TOL; the axis is
    not numerically recoverable there and no silent branch is taken.
    """
    R = np.asarray(R, dtype=float)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr <= -1.0 + TRACE_PI_TOL:
        raise NearPiSingularity(f"trace {tr:.12f} is at the pi branch cut")
    # u = sin(theta) * axis, exact for skew part extraction.
    u = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    s = math.sqrt(u @ u)
    c = min(max(0.5 * (tr - 1.0), -1.0), 1.0)
    theta = math.atan2(s, c)
    if theta < SMALL_ANGLE:
        return u * (1.0 + s * s / 6.0)
    return u * (theta / s)


def exp_se3(xi: Twist) -> Pose:
    """Exponential of a twist: rotation by exp_so3, position through the left Jacobian."""
    w = np.asarray(xi.angular, dtype=float)
    v = np.asarray(xi.linear, dtype=float)
    theta = math.sqrt(w @ w)
    K = hat3(w)
    KK = K @ K
    if theta < SMALL_ANGLE:
        R = _EYE3 + K + 0.5 * KK
        V = _EYE3 + 0.5 * K + KK / 6.0
    else:
        t2 = theta * theta
        a = math.sin(theta) / theta
        b = 2.0 * math.sin(0.5 * theta) ** 2 / t2
        c = (theta - math.sin(theta)) / (t2 * theta)
        R = _EYE3 + a * K + b * KK
        V = _EYE3 + b * K + c * KK
    return Pose(R, V @ v)


def log_se3(g: Pose) -> Twist:
    """Inverse of exp_se3. Inherits the near-pi guard from log_so3."""
    w = log_so3(g.rotation)
    theta = math.sqrt(w @ w)
    K = hat3(w)
    KK = K @ K
    if theta < SMALL_ANGLE:
        Vinv = _EYE3 - 0.5 * K + KK / 12.0
    else:
        # half-angle cotangent form keeps the coefficient stable for all theta < pi
        half = 0.5 * theta
        d = (1.0 - half / math.tan(half)) / (theta * theta)
        Vinv = _EYE3 - 0.5 * K + d * KK
    return Twist(w, Vinv @ g.position)


def compose(a: Pose, b: Pose) -> Pose:
    """Group product a * b."""
    return Pose(a.rotation @ b.rotation, a.rotation @ b.position + a.position)


def inverse(g: Pose) -> Pose:
    """Group inverse."""
    Rt = g.rotation.T
    return Pose(Rt, -(Rt @ g.position))


def adjoint(g: Pose, xi: Twist) -> Twist:
    """Adjoint action of a pose on a twist (change of body frame)."""
    Rw = g.rotation @ xi.angular
    return Twist(Rw, _cross(g.position, Rw) + g.rotation @ xi.linear)


def rotation_drift(R) -> float:
    """Frobenius distance of R^T R from the identity."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - _EYE3))


def project_rotation(R) -> np.ndarray:
    """Nearest rotation matrix (polar factor via SVD, det forced to +1)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    M = U @ Vt
    if np.linalg.det(M) < 0.0:
        U = U.copy()
        U[:, -1] = -U[:, -1]
        M = U @ Vt
    return M


def quaternion_from_rotation(R) -> np.ndarray:
    """Unit quaternion (w, x, y, z) with w >= 0 for a rotation matrix."""
    R = np.asarray(R, dtype=float)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = np.array([
            0.25 * s,
            (R[2, 1] - R[1, 2]) / s,
            (R[0, 2] - R[2, 0]) / s,
            (R[1, 0] - R[0, 1]) / s,
        ])
    elif R[0, 0] >= R[1, 1] and R[0, 0] >= R[2, 2]:
        s = math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2]) * 2.0
        q = np.array([
            (R[2, 1] - R[1, 2]) / s,
            0.25 * s,
            (R[0, 1] + R[1, 0]) / s,
            (R[0, 2] + R[2, 0]) / s,
        ])
    elif R[1, 1] >= R[2, 2]:
        s = math.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2]) * 2.0
        q = np.array([
            (R[0, 2] - R[2, 0]) / s,
            (R[0, 1] + R[1, 0]) / s,
            0.25 * s,
            (R[1, 2] + R[2, 1]) / s,
        ])
    else:
        s = math.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1]) * 2.0
        q = np.array([
            (R[1, 0] - R[0, 1]) / s,
            (R[0, 2] + R[2, 0]) / s,
            (R[1, 2] + R[2, 1]) / s,
            0.25 * s,
        ])
    q /= np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return q
