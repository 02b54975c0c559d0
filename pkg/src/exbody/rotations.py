"""Quaternion and Euler-angle algebra shared by retargeting, kinematics and control.

Conventions
-----------
- Quaternions are numpy arrays ``[x, y, z, w]`` and must be unit-norm for
  all rotation uses.
- All angles are radians.
- Roll/pitch/yaw is the intrinsic Z-Y-X convention: ``q = qz(yaw) * qy(pitch) * qx(roll)``.
- The double cover is resolved by canonicalizing ``w >= 0``, which keeps
  axis-angle output in ``[0, pi]`` and converted trajectories continuous.
"""

from __future__ import annotations

import math

import numpy as np

UNIT_TOL = 1e-6
# Threshold on sqrt(1 - w^2) below which the rotation axis is ill-defined
# and a caller-supplied fallback axis is used instead.
AXIS_EPS = 1e-6

DEFAULT_FALLBACK_AXIS = np.array([0.0, 0.0, 1.0])

_AXIS_VECTORS = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}


def identity_quat() -> np.ndarray:
    return np.array([0.0, 0.0, 0.0, 1.0])


def quat_norm_check(q: np.ndarray, tol: float = UNIT_TOL) -> None:
    """Raise ValueError if ``q`` deviates from unit norm by more than ``tol``."""
    n = math.sqrt(float(q[0] ** 2 + q[1] ** 2 + q[2] ** 2 + q[3] ** 2))
    if abs(n - 1.0) > tol:
        raise ValueError(f"quaternion is not unit-norm (|q| = {n:.9f})")


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n < 1e-12:
        raise ValueError("cannot normalize a near-zero quaternion")
    return q / n


def quat_canonical(q: np.ndarray) -> np.ndarray:
    """Flip sign so w >= 0 (both signs encode the same rotation)."""
    return -q if q[3] < 0.0 else q


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product; ``quat_mul(a, b)`` applies ``b`` first, then ``a``."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return np.array(
        [
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
            aw * bw - ax * bx - ay * by - az * bz,
        ]
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([-q[0], -q[1], -q[2], q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector ``v`` by quaternion ``q`` (q * [v,0] * q^-1), expanded form."""
    qx, qy, qz, qw = q
    # t = 2 q_vec x v
    tx = 2.0 * (qy * v[2] - qz * v[1])
    ty = 2.0 * (qz * v[0] - qx * v[2])
    tz = 2.0 * (qx * v[1] - qy * v[0])
    return np.array(
        [
            v[0] + qw * tx + qy * tz - qz * ty,
            v[1] + qw * ty + qz * tx - qx * tz,
            v[2] + qw * tz + qx * ty - qy * tx,
        ]
    )


def axis_angle_to_quat(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"rotation axis is not unit-norm (|a| = {n:.9f})")
    half = 0.5 * angle
    s = math.sin(half)
    return np.array([axis[0] * s, axis[1] * s, axis[2] * s, math.cos(half)])


def quat_to_axis_angle(
    q: np.ndarray, fallback_axis: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """Decompose a unit quaternion into (unit axis, angle in [0, pi]).

    Near the identity the axis is numerically meaningless; below ``AXIS_EPS``
    the ``fallback_axis`` is returned with the angle still computed from w.
    Callers converting a trajectory should pass the previous frame's axis.
    """
    quat_norm_check(q)
    q = quat_canonical(q)
    w = min(1.0, float(q[3]))
    angle = 2.0 * math.acos(w)
    s = math.sqrt(max(0.0, 1.0 - w * w))
    if s < AXIS_EPS:
        axis = DEFAULT_FALLBACK_AXIS if fallback_axis is None else np.asarray(fallback_axis, dtype=float)
        return axis.copy(), angle
    return np.array([q[0] / s, q[1] / s, q[2] / s]), angle


def project_to_axis(q: np.ndarray, axis: np.ndarray) -> float:
    """Signed rotation angle of ``q`` about ``axis``: theta * dot(a, axis)."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"projection axis is not unit-norm (|a| = {n:.9f})")
    a, theta = quat_to_axis_angle(q)
    if theta == 0.0:
        return 0.0
    return theta * float(np.dot(a, axis))


def axis_quat(axis: str, angle: float) -> np.ndarray:
    """Quaternion for a rotation about the named coordinate axis."""
    return axis_angle_to_quat(_AXIS_VECTORS[axis], angle)


def euler_to_quat(angles: dict[str, float], order: str) -> np.ndarray:
    """Compose per-axis rotations in ``order`` (e.g. "XYZ"), first axis applied first.

    Rotations are about fixed (extrinsic) axes, so the composed quaternion is
    q_last * ... * q_first. Axes missing from ``angles`` contribute nothing.
    """
    q = identity_quat()
    for ch in order.lower():
        if ch not in _AXIS_VECTORS:
            raise ValueError(f"unknown rotation axis {ch!r} in order {order!r}")
        ang = angles.get(ch, 0.0)
        if ang != 0.0:
            q = quat_mul(axis_quat(ch, ang), q)
    return q


def rpy_to_quat(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Intrinsic Z-Y-X: yaw about z, then pitch about the new y, then roll."""
    return quat_mul(axis_quat("z", yaw), quat_mul(axis_quat("y", pitch), axis_quat("x", roll)))


def quat_to_rpy(q: np.ndarray) -> np.ndarray:
    """Extract (roll, pitch, yaw); valid away from the |pitch| = pi/2 gimbal lock."""
    x, y, z, w = q
    roll = math.atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y))
    sinp = max(-1.0, min(1.0, 2.0 * (w * y - z * x)))
    pitch = math.asin(sinp)
    yaw = math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))
    return np.array([roll, pitch, yaw])


def yaw_of(q: np.ndarray) -> float:
    x, y, z, w = q
    return math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))


def slerp(q0: np.ndarray, q1: np.ndarray, u: float) -> np.ndarray:
    """Spherical interpolation along the shorter arc, u in [0, 1]."""
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    dot = float(np.dot(q0, q1))
    if dot < 0.0:
        q1 = -q1
        dot = -dot
    if dot > 1.0 - 1e-10:
        return quat_normalize(q0 + u * (q1 - q0))
    theta = math.acos(min(1.0, dot))
    s = math.sin(theta)
    return (math.sin((1.0 - u) * theta) / s) * q0 + (math.sin(u * theta) / s) * q1


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]; -pi maps to +pi by convention."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w < 0.0:
        w += 2.0 * math.pi
    w -= math.pi
    if w == -math.pi:
        return math.pi
    return w


def relative_rotation_vector(q_from: np.ndarray, q_to: np.ndarray) -> np.ndarray:
    """Rotation vector (axis * angle) taking ``q_from`` to ``q_to``."""
    rel = quat_mul(q_to, quat_conjugate(q_from))
    axis, angle = quat_to_axis_angle(quat_normalize(rel))
    return axis * angle
