"""19-DoF humanoid model and forward kinematics.

The model ships as a YAML data file (joint table, keypoint list, limits,
mass, nominal height). Link offsets approximate a human-sized robot with
3-DoF hips/shoulders and 1-DoF torso/elbows/knees/ankles; they are NOT
measured from hardware and all tests are self-consistent against the
shipped file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .rotations import axis_angle_to_quat, quat_mul, quat_rotate, quat_to_rpy, rpy_to_quat

NUM_JOINTS = 19
NUM_KEYPOINTS = 6

# Fixed stacking order of keypoint world positions in the 18-vector.
KEYPOINT_ORDER = ("l_shoulder", "r_shoulder", "l_elbow", "r_elbow", "l_hand", "r_hand")


@dataclass(frozen=True)
class JointSpec:
    name: str
    parent: str | None  # parent joint name, None = attached to the root link
    axis: np.ndarray  # unit rotation axis in the local frame
    offset: np.ndarray  # translation from the parent frame, meters
    lower: float  # position limit, radians
    upper: float


@dataclass(frozen=True)
class PointSpec:
    """A named point rigidly attached to a joint frame."""

    name: str
    joint: str
    offset: np.ndarray


@dataclass
class RootPose:
    position: np.ndarray
    orientation: np.ndarray  # unit quaternion [x, y, z, w]

    @property
    def roll(self) -> float:
        return float(quat_to_rpy(self.orientation)[0])

    @property
    def pitch(self) -> float:
        return float(quat_to_rpy(self.orientation)[1])

    @property
    def yaw(self) -> float:
        return float(quat_to_rpy(self.orientation)[2])

    @property
    def rpy(self) -> np.ndarray:
        return quat_to_rpy(self.orientation)

    @staticmethod
    def identity() -> "RootPose":
        return RootPose(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

    @staticmethod
    def from_rpy(position: np.ndarray, roll: float, pitch: float, yaw: float) -> "RootPose":
        return RootPose(np.asarray(position, dtype=float), rpy_to_quat(roll, pitch, yaw))


@dataclass
class RobotModel:
    joints: list[JointSpec]
    keypoints: list[PointSpec]  # exactly the 6 entries of KEYPOINT_ORDER
    feet: list[PointSpec]  # ground-contact probes used for height alignment
    lower_keypoints: list[PointSpec]  # knees + feet, used by full-body tracking
    upper_body_order: list[str]  # 9 names: torso, L-shoulder triple, R-shoulder triple, elbows
    mass: float
    nominal_height: float
    nominal_root_height: float
    default_pose: np.ndarray  # 19-vector, radians

    # derived lookups (filled in __post_init__)
    _index: dict[str, int] = field(default_factory=dict, repr=False)
    _parent_index: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self._index = {j.name: i for i, j in enumerate(self.joints)}
        self._parent_index = np.array(
            [-1 if j.parent is None else self._index[j.parent] for j in self.joints]
        )
        self._axes = np.stack([j.axis for j in self.joints])
        self._offsets = np.stack([j.offset for j in self.joints])
        self._kp_joint = [self._index[p.joint] for p in self.keypoints]
        self._validate()

    def _validate(self) -> None:
        if len(self.joints) != NUM_JOINTS:
            raise ValueError(f"expected {NUM_JOINTS} joints, got {len(self.joints)}")
        if len(self.keypoints) != NUM_KEYPOINTS:
            raise ValueError(f"expected {NUM_KEYPOINTS} keypoints, got {len(self.keypoints)}")
        names = [p.name for p in self.keypoints]
        if tuple(names) != KEYPOINT_ORDER:
            raise ValueError(f"keypoints must be ordered {KEYPOINT_ORDER}, got {names}")
        if len(self.upper_body_order) != 9:
            raise ValueError("upper_body_order must name 9 joints")
        for i, j in enumerate(self.joints):
            if self._parent_index[i] >= i:
                raise ValueError(f"joint table not topologically ordered at {j.name!r}")
            if abs(np.linalg.norm(j.axis) - 1.0) > 1e-9:
                raise ValueError(f"axis of {j.name!r} is not unit-norm")
            if j.lower > j.upper:
                raise ValueError(f"limits of {j.name!r} are inverted")
        for triple in self.spherical_triples():
            a = [self.joints[i].axis for i in triple]
            for u, v in ((0, 1), (0, 2), (1, 2)):
                if abs(float(np.dot(a[u], a[v]))) > 1e-9:
                    raise ValueError("hip/shoulder triple axes must be mutually perpendicular")

    def joint_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown joint {name!r}; known: {list(self._index)}") from None

    def joint_names(self) -> list[str]:
        return [j.name for j in self.joints]

    @property
    def lower_limits(self) -> np.ndarray:
        return np.array([j.lower for j in self.joints])

    @property
    def upper_limits(self) -> np.ndarray:
        return np.array([j.upper for j in self.joints])

    @property
    def upper_body_indices(self) -> np.ndarray:
        return np.array([self.joint_index(n) for n in self.upper_body_order])

    @property
    def lower_body_indices(self) -> np.ndarray:
        upper = set(self.upper_body_order)
        return np.array([i for i, j in enumerate(self.joints) if j.name not in upper])

    def spherical_triples(self) -> list[tuple[int, int, int]]:
        """Consecutive joint triples whose names share a hip/shoulder prefix."""
        triples = []
        for stem in ("left_hip", "right_hip", "left_shoulder", "right_shoulder"):
            idx = [i for i, j in enumerate(self.joints) if j.name.startswith(stem)]
            if len(idx) != 3:
                raise ValueError(f"expected a 3-joint cluster for {stem!r}")
            triples.append(tuple(sorted(idx)))
        return triples


def _frames(model: RobotModel, root: RootPose, q: np.ndarray):
    """World position and orientation of every joint frame (after its rotation)."""
    pos = np.empty((NUM_JOINTS, 3))
    quat = np.empty((NUM_JOINTS, 4))
    for i in range(NUM_JOINTS):
        p = model._parent_index[i]
        if p < 0:
            base_pos, base_quat = root.position, root.orientation
        else:
            base_pos, base_quat = pos[p], quat[p]
        pos[i] = base_pos + quat_rotate(base_quat, model._offsets[i])
        quat[i] = quat_mul(base_quat, axis_angle_to_quat(model._axes[i], float(q[i])))
    return pos, quat


def forward_kinematics(model: RobotModel, root: RootPose, q: np.ndarray) -> np.ndarray:
    """World positions of the 6 keypoints, stacked per KEYPOINT_ORDER (18-vector)."""
    q = np.asarray(q, dtype=float)
    if q.shape != (NUM_JOINTS,):
        raise ValueError(f"expected a {NUM_JOINTS}-vector of joint angles, got shape {q.shape}")
    pos, quat = _frames(model, root, q)
    out = np.empty(18)
    for k, p in enumerate(model.keypoints):
        j = model._kp_joint[k]
        out[3 * k : 3 * k + 3] = pos[j] + quat_rotate(quat[j], p.offset)
    return out


def point_positions(
    model: RobotModel, root: RootPose, q: np.ndarray, points: list[PointSpec]
) -> np.ndarray:
    """World positions of arbitrary attached points, stacked (len(points)*3,)."""
    pos, quat = _frames(model, root, q)
    out = np.empty(3 * len(points))
    for k, p in enumerate(points):
        j = model.joint_index(p.joint)
        out[3 * k : 3 * k + 3] = pos[j] + quat_rotate(quat[j], p.offset)
    return out


def _parse_points(raw: list[dict]) -> list[PointSpec]:
    return [
        PointSpec(name=d["name"], joint=d["joint"], offset=np.array(d["offset"], dtype=float))
        for d in raw
    ]


def load_robot_model(path: str | Path) -> RobotModel:
    with open(path) as f:
        doc = yaml.safe_load(f)
    joints = [
        JointSpec(
            name=d["name"],
            parent=d.get("parent"),
            axis=np.array(d["axis"], dtype=float),
            offset=np.array(d["offset"], dtype=float),
            lower=float(d["limits"][0]),
            upper=float(d["limits"][1]),
        )
        for d in doc["joints"]
    ]
    return RobotModel(
        joints=joints,
        keypoints=_parse_points(doc["keypoints"]),
        feet=_parse_points(doc["feet"]),
        lower_keypoints=_parse_points(doc["lower_keypoints"]),
        upper_body_order=list(doc["upper_body_order"]),
        mass=float(doc["mass"]),
        nominal_height=float(doc["nominal_height"]),
        nominal_root_height=float(doc["nominal_root_height"]),
        default_pose=np.array(doc["default_pose"], dtype=float),
    )


def default_robot_model() -> RobotModel:
    """The shipped approximate model."""
    ref = resources.files("exbody.data").joinpath("humanoid_19dof.yaml")
    with resources.as_file(ref) as path:
        return load_robot_model(path)
