"""Map human motion clips onto the 19-DoF robot skeleton.

Hip/shoulder clusters are treated as spherical joints: the source rotation
is converted to axis-angle and the rotation vector theta*a is distributed
over the cluster, each motor taking the component along its own axis
(iterating the cluster in model-file order). 1-DoF joints (elbow, torso,
knee, ankle) take the rotation angle projected onto their axis; the
discarded off-axis residual is recorded per joint for diagnostics.

Joint values exceeding model position limits are reported, never clamped —
downstream training is expected to handle retargeting artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .mocap import ClipMeta, RawMotionClip
from .robot import NUM_JOINTS, PointSpec, RobotModel, RootPose, forward_kinematics, point_positions
from .rotations import (
    axis_angle_to_quat,
    quat_conjugate,
    quat_mul,
    quat_norm_check,
    quat_to_axis_angle,
    project_to_axis,
    relative_rotation_vector,
)


@dataclass
class JointMapping:
    spherical: dict[str, tuple[int, int, int]]  # human joint -> robot triple indices
    hinge: dict[str, tuple[int, np.ndarray]]  # human joint -> (robot index, axis)
    root: str  # human root bone name

    def __post_init__(self):
        used: list[int] = []
        for name, triple in self.spherical.items():
            if len(set(triple)) != 3 or list(triple) != list(range(triple[0], triple[0] + 3)):
                raise ValueError(f"triple for {name!r} must be 3 distinct consecutive indices")
            used.extend(triple)
        used.extend(idx for idx, _ in self.hinge.values())
        if sorted(used) != list(range(NUM_JOINTS)):
            raise ValueError("every robot joint index must appear in exactly one mapping entry")


@dataclass
class RetargetReport:
    """Per-joint worst excess over position limits plus hinge projection residuals."""

    joint_limit_excess: dict[str, float] = field(default_factory=dict)
    hinge_residual: dict[str, float] = field(default_factory=dict)

    @property
    def has_violations(self) -> bool:
        return bool(self.joint_limit_excess)

    def to_dict(self) -> dict:
        return {
            "joint_limit_excess": dict(self.joint_limit_excess),
            "hinge_residual": dict(self.hinge_residual),
        }


@dataclass
class RetargetedClip:
    """A robot-compatible motion: joint angles, root pose, keypoints and velocities.

    All velocities are finite differences of the stored positions (central
    at interior frames, one-sided at the ends).
    """

    frame_rate: float
    q: np.ndarray  # (N, 19) radians
    dq: np.ndarray  # (N, 19) rad/s
    root_position: np.ndarray  # (N, 3) meters
    root_orientation: np.ndarray  # (N, 4) unit quaternions
    root_linear_velocity: np.ndarray  # (N, 3) m/s
    root_angular_velocity: np.ndarray  # (N, 3) rad/s
    keypoints: np.ndarray  # (N, 18) meters, world frame
    lower_keypoints: np.ndarray  # (N, 12) knees + feet, for full-body tracking
    meta: ClipMeta
    limit_report: RetargetReport = field(default_factory=RetargetReport)
    joint_names: list[str] = field(default_factory=list)
    upper_body_indices: np.ndarray = field(default_factory=lambda: np.zeros(9, dtype=int))
    lower_body_indices: np.ndarray = field(default_factory=lambda: np.zeros(10, dtype=int))

    def __post_init__(self):
        n = self.q.shape[0]
        if n < 2:
            raise ValueError("a retargeted clip needs at least 2 frames")
        if self.frame_rate <= 0:
            raise ValueError("frame rate must be positive")
        shapes = {
            "q": (n, NUM_JOINTS), "dq": (n, NUM_JOINTS), "root_position": (n, 3),
            "root_orientation": (n, 4), "root_linear_velocity": (n, 3),
            "root_angular_velocity": (n, 3), "keypoints": (n, 18),
            "lower_keypoints": (n, 12),
        }
        for name, shape in shapes.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")

    @property
    def num_frames(self) -> int:
        return self.q.shape[0]

    @property
    def duration(self) -> float:
        return (self.num_frames - 1) / self.frame_rate

    def root_pose(self, frame: int) -> RootPose:
        return RootPose(self.root_position[frame].copy(), self.root_orientation[frame].copy())


def exp_map_spherical(q_m: np.ndarray, fallback_axis: np.ndarray | None = None) -> np.ndarray:
    """Rotation vector theta*a of a unit quaternion (the spherical-joint map)."""
    quat_norm_check(q_m)
    axis, angle = quat_to_axis_angle(q_m, fallback_axis=fallback_axis)
    return axis * angle


def finite_difference(values: np.ndarray, frame_rate: float) -> np.ndarray:
    """Central differences along axis 0, one-sided at both ends."""
    out = np.empty_like(values, dtype=float)
    out[1:-1] = (values[2:] - values[:-2]) * (frame_rate / 2.0)
    out[0] = (values[1] - values[0]) * frame_rate
    out[-1] = (values[-1] - values[-2]) * frame_rate
    return out


def _angular_velocity(quats: np.ndarray, frame_rate: float) -> np.ndarray:
    n = quats.shape[0]
    out = np.empty((n, 3))
    for k in range(n):
        if 0 < k < n - 1:
            out[k] = relative_rotation_vector(quats[k - 1], quats[k + 1]) * (frame_rate / 2.0)
        elif k == 0:
            out[k] = relative_rotation_vector(quats[0], quats[1]) * frame_rate
        else:
            out[k] = relative_rotation_vector(quats[-2], quats[-1]) * frame_rate
    return out


def retarget_clip(raw: RawMotionClip, mapping: JointMapping, model: RobotModel) -> RetargetedClip:
    """Retarget one human clip onto the robot skeleton."""
    if raw.frame_rate <= 0:
        raise ValueError("frame rate must be positive")
    for name in list(mapping.spherical) + list(mapping.hinge) + [mapping.root]:
        if name != mapping.root and name not in raw.rotations:
            raise KeyError(f"mapped human joint {name!r} missing from the source clip")

    n = raw.num_frames
    q = np.zeros((n, NUM_JOINTS))
    report = RetargetReport()
    last_axis: dict[str, np.ndarray] = {}

    for f in range(n):
        for human, triple in mapping.spherical.items():
            m = exp_map_spherical(raw.rotations[human][f], fallback_axis=last_axis.get(human))
            norm = np.linalg.norm(m)
            if norm > 1e-12:
                last_axis[human] = m / norm
            for idx in triple:
                q[f, idx] = float(np.dot(m, model.joints[idx].axis))
        for human, (idx, axis) in mapping.hinge.items():
            q_m = raw.rotations[human][f]
            theta = project_to_axis(q_m, axis)
            q[f, idx] = theta
            residual = quat_mul(quat_conjugate(axis_angle_to_quat(axis, theta)), q_m)
            _, res_angle = quat_to_axis_angle(residual / np.linalg.norm(residual))
            name = model.joints[idx].name
            report.hinge_residual[name] = max(report.hinge_residual.get(name, 0.0), res_angle)

    root_position = raw.root_translation.copy()
    root_orientation = raw.rotations.get(mapping.root)
    if root_orientation is None:
        raise KeyError(f"root bone {mapping.root!r} missing from the source clip")
    root_orientation = root_orientation.copy()

    # Ground alignment: shift root height so the lowest foot over the whole
    # clip touches z = 0.
    min_foot_z = np.inf
    for f in range(n):
        feet = point_positions(model, RootPose(root_position[f], root_orientation[f]), q[f], model.feet)
        min_foot_z = min(min_foot_z, float(feet[2]), float(feet[5]))
    root_position[:, 2] -= min_foot_z

    keypoints = np.empty((n, 18))
    lower_keypoints = np.empty((n, 12))
    for f in range(n):
        pose = RootPose(root_position[f], root_orientation[f])
        keypoints[f] = forward_kinematics(model, pose, q[f])
        lower_keypoints[f] = point_positions(model, pose, q[f], model.lower_keypoints)

    report.joint_limit_excess = _limit_excess(q, model)

    clip = RetargetedClip(
        frame_rate=raw.frame_rate,
        q=q,
        dq=finite_difference(q, raw.frame_rate),
        root_position=root_position,
        root_orientation=root_orientation,
        root_linear_velocity=finite_difference(root_position, raw.frame_rate),
        root_angular_velocity=_angular_velocity(root_orientation, raw.frame_rate),
        keypoints=keypoints,
        lower_keypoints=lower_keypoints,
        meta=ClipMeta(raw.meta.id, raw.meta.description, raw.meta.category, raw.meta.duration),
        limit_report=report,
        joint_names=model.joint_names(),
        upper_body_indices=model.upper_body_indices,
        lower_body_indices=model.lower_body_indices,
    )
    return clip


def _limit_excess(q: np.ndarray, model: RobotModel) -> dict[str, float]:
    lower, upper = model.lower_limits, model.upper_limits
    over = np.maximum(q - upper, 0.0).max(axis=0)
    under = np.maximum(lower - q, 0.0).max(axis=0)
    excess = np.maximum(over, under)
    return {
        model.joints[i].name: float(excess[i])
        for i in range(NUM_JOINTS)
        if excess[i] > 0.0
    }


def validate_limits(clip: RetargetedClip, model: RobotModel) -> dict[str, float]:
    """Per-joint max excess over position limits; empty iff all frames within limits."""
    return _limit_excess(clip.q, model)


def load_mapping(path: str | Path, model: RobotModel) -> JointMapping:
    with open(path) as f:
        doc = yaml.safe_load(f)
    spherical = {
        human: tuple(model.joint_index(j) for j in joints)
        for human, joints in doc["spherical"].items()
    }
    hinge = {}
    for human, entry in doc["hinge"].items():
        idx = model.joint_index(entry["joint"])
        axis = np.array(entry.get("axis", model.joints[idx].axis), dtype=float)
        hinge[human] = (idx, axis)
    return JointMapping(spherical=spherical, hinge=hinge, root=doc["root"])


def default_mapping(model: RobotModel) -> JointMapping:
    """The shipped CMU-bone-name mapping."""
    ref = resources.files("exbody.data").joinpath("cmu_mapping.yaml")
    with resources.as_file(ref) as path:
        return load_mapping(path, model)
