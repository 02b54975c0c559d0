"""Tracking and regularization reward terms with per-term breakdowns.

Tracking terms are exponentials of tracking error; regularization terms
penalize contact, smoothness and posture violations. All vector residuals
use the L2 norm, scalars use absolute value. Default weights live in
RewardWeights and must not be edited in place; override via config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .goals import ExpressionGoal, FullBodyGoal, MovementGoal, delta_yaw

EXBODY_MODE = "exbody"
FULL_BODY_MODE = "full-body-tracking"

_GRAVITY = 9.81


@dataclass
class RewardWeights:
    # tracking
    dof_position: float = 3.0
    keypoint_position: float = 2.0
    linear_velocity: float = 6.0
    roll_pitch: float = 1.0
    yaw: float = 1.0
    # tracking error scales (inside the exponentials)
    dof_position_scale: float = 0.7
    linear_velocity_scale: float = 4.0
    # regularization
    feet_height: float = 2.0
    feet_air_time: float = 10.0
    feet_drag: float = -0.1
    contact_force: float = -3e-3
    stumble: float = -2.0
    dof_acceleration: float = -3e-7
    action_rate: float = -0.1
    energy: float = -1e-3
    collision: float = -0.1
    dof_limit: float = -10.0
    dof_deviation: float = -10.0
    vertical_velocity: float = -1.0
    horizontal_angular_velocity: float = -0.4
    projected_gravity: float = -2.0
    # thresholds
    contact_force_threshold: float = 350.0  # newtons; not specified anywhere, configurable
    feet_height_target: float = 0.2  # meters
    feet_height_cap: float = 0.3  # cap on the raw clearance value, bounds the reward

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @staticmethod
    def from_dict(doc: dict) -> "RewardWeights":
        known = {f.name for f in fields(RewardWeights)}
        bad = set(doc) - known
        if bad:
            raise ValueError(f"unknown reward weight fields: {sorted(bad)}")
        return RewardWeights(**doc)


@dataclass
class EnvStateSnapshot:
    """Everything the reward stack needs about the robot at one control step.

    Per-foot arrays are ordered (left, right). ``foot_air_time`` holds the
    completed airborne duration at a landing step (when ``foot_new_contact``
    is set) and the running airborne timer otherwise; it is zero while a
    foot stays planted.
    """

    q: np.ndarray  # (19,) radians
    dq: np.ndarray  # (19,) rad/s
    ddq: np.ndarray  # (19,) rad/s^2
    root_lin_vel: np.ndarray  # (3,) m/s, world frame
    roll: float
    pitch: float
    yaw: float
    root_height: float
    root_position: np.ndarray  # (3,) world frame; never enters observations
    keypoints: np.ndarray  # (18,) world frame
    foot_heights: np.ndarray  # (2,)
    foot_air_time: np.ndarray  # (2,) seconds
    foot_new_contact: np.ndarray  # (2,) bool
    foot_in_contact: np.ndarray  # (2,) bool
    foot_contact_force: np.ndarray  # (2, 3) newtons
    foot_velocity: np.ndarray  # (2, 3) m/s
    action: np.ndarray  # (19,)
    prev_action: np.ndarray  # (19,)
    self_collision: bool
    projected_gravity_xy: np.ndarray  # (2,) gravity direction in body frame, xy
    default_pose_lower: np.ndarray  # (10,) default lower-body posture
    lower_body_indices: np.ndarray  # (10,)
    upper_body_indices: np.ndarray  # (9,)
    joint_limit_lower: np.ndarray  # (19,) radians
    joint_limit_upper: np.ndarray  # (19,)
    torque: np.ndarray = None  # (19,) N*m; needed by the energy term
    lower_keypoints: np.ndarray = None  # (12,) only needed in full-body mode
    root_ang_vel: np.ndarray = None  # (3,) rad/s
    control_dt: float = 0.02  # seconds between consecutive snapshots

    def __post_init__(self):
        if self.torque is None:
            self.torque = np.zeros(19)
        if self.root_ang_vel is None:
            self.root_ang_vel = np.zeros(3)


@dataclass
class RewardBreakdown:
    """Named term -> (raw value, weighted value) plus section totals."""

    terms: dict[str, tuple[float, float]] = field(default_factory=dict)
    expression_total: float = 0.0
    movement_total: float = 0.0
    regularization_total: float = 0.0

    def add(self, name: str, raw: float, weight: float) -> float:
        weighted = weight * raw
        self.terms[name] = (raw, weighted)
        return weighted

    @property
    def total(self) -> float:
        return sum(w for _, w in self.terms.values())

    def weighted(self, name: str) -> float:
        return self.terms[name][1]


def expression_reward(
    s: EnvStateSnapshot,
    goal: ExpressionGoal | FullBodyGoal,
    w: RewardWeights,
    breakdown: RewardBreakdown | None = None,
) -> RewardBreakdown:
    """DoF-position and keypoint tracking terms.

    An ExpressionGoal compares against the 9 upper-body joints and the 6
    upper keypoints; a FullBodyGoal against all 19 joints and 10 keypoints.
    """
    b = breakdown if breakdown is not None else RewardBreakdown()
    if isinstance(goal, FullBodyGoal):
        q_actual = s.q
        if s.lower_keypoints is None:
            raise ValueError("full-body goal requires lower keypoints in the snapshot")
        p_actual = np.concatenate([s.keypoints, s.lower_keypoints])
    else:
        q_actual = s.q[s.upper_body_indices]
        p_actual = s.keypoints
    if goal.q_ref.shape != q_actual.shape:
        raise ValueError(f"goal q_ref shape {goal.q_ref.shape} vs state {q_actual.shape}")
    if goal.p_ref.shape != p_actual.shape:
        raise ValueError(f"goal p_ref shape {goal.p_ref.shape} vs state {p_actual.shape}")

    dof_err = float(np.linalg.norm(goal.q_ref - q_actual))
    kp_err = float(np.linalg.norm(goal.p_ref - p_actual))
    total = b.add("dof_position", math.exp(-w.dof_position_scale * dof_err), w.dof_position)
    total += b.add("keypoint_position", math.exp(-kp_err), w.keypoint_position)
    b.expression_total += total
    return b


def movement_reward(
    s: EnvStateSnapshot,
    goal: MovementGoal,
    w: RewardWeights,
    breakdown: RewardBreakdown | None = None,
) -> RewardBreakdown:
    b = breakdown if breakdown is not None else RewardBreakdown()
    vel_err = float(np.linalg.norm(goal.v_ref - s.root_lin_vel))
    rp_err = math.hypot(goal.rpy_ref[0] - s.roll, goal.rpy_ref[1] - s.pitch)
    dy = delta_yaw(s.yaw, float(goal.rpy_ref[2]))
    total = b.add("linear_velocity", math.exp(-w.linear_velocity_scale * vel_err), w.linear_velocity)
    total += b.add("roll_pitch", math.exp(-rp_err), w.roll_pitch)
    total += b.add("yaw", math.exp(-abs(dy)), w.yaw)
    b.movement_total += total
    return b


def regularization_reward(
    s: EnvStateSnapshot,
    s_prev: EnvStateSnapshot | None,
    w: RewardWeights,
    breakdown: RewardBreakdown | None = None,
) -> RewardBreakdown:
    """All regularization terms; ``s_prev`` backs up missing derivative fields."""
    b = breakdown if breakdown is not None else RewardBreakdown()
    ddq = s.ddq
    if ddq is None:
        if s_prev is None:
            raise ValueError("need ddq in the snapshot or a previous snapshot")
        ddq = (s.dq - s_prev.dq) / s.control_dt

    total = 0.0
    clearance = np.maximum(np.abs(s.foot_heights) - w.feet_height_target, 0.0).sum()
    total += b.add("feet_height", min(float(clearance), w.feet_height_cap), w.feet_height)

    air = float(np.sum(s.foot_air_time * s.foot_new_contact))
    total += b.add("feet_air_time", air, w.feet_air_time)

    dragging = s.foot_in_contact & ~s.foot_new_contact
    drag = float(np.sum(np.linalg.norm(s.foot_velocity, axis=1) * dragging))
    total += b.add("feet_drag", drag, w.feet_drag)

    fz = np.abs(s.foot_contact_force[:, 2])
    excess = np.where(fz >= w.contact_force_threshold, fz - w.contact_force_threshold, 0.0)
    total += b.add("contact_force", float(excess.sum()), w.contact_force)

    fxy = np.linalg.norm(s.foot_contact_force[:, :2], axis=1)
    stumble = bool(np.any(fxy > 4.0 * fz))
    total += b.add("stumble", float(stumble), w.stumble)

    total += b.add("dof_acceleration", float(np.dot(ddq, ddq)), w.dof_acceleration)
    total += b.add("action_rate", float(np.linalg.norm(s.prev_action - s.action)), w.action_rate)
    total += b.add("energy", float(np.sum(np.abs(s.torque * s.dq))), w.energy)
    total += b.add("collision", float(s.self_collision), w.collision)

    low = s.lower_body_indices
    dev = s.default_pose_lower - s.q[low]
    total += b.add("dof_deviation", float(np.dot(dev, dev)), w.dof_deviation)

    violations = int(np.sum((s.q > s.joint_limit_upper) | (s.q < s.joint_limit_lower)))
    total += b.add("dof_limit", float(violations), w.dof_limit)

    total += b.add("vertical_velocity", float(s.root_lin_vel[2] ** 2), w.vertical_velocity)
    wxy = s.root_ang_vel[:2]
    total += b.add("horizontal_angular_velocity", float(np.dot(wxy, wxy)), w.horizontal_angular_velocity)
    gxy = s.projected_gravity_xy
    total += b.add("projected_gravity", float(np.dot(gxy, gxy)), w.projected_gravity)

    b.regularization_total += total
    return b


def total_reward(
    s: EnvStateSnapshot,
    s_prev: EnvStateSnapshot | None,
    expression_goal: ExpressionGoal | FullBodyGoal,
    movement_goal: MovementGoal,
    w: RewardWeights,
    mode: str = EXBODY_MODE,
    include_regularization: bool = True,
) -> RewardBreakdown:
    """Full per-step breakdown: expression + movement (+ regularization)."""
    if mode not in (EXBODY_MODE, FULL_BODY_MODE):
        raise ValueError(f"unknown reward mode {mode!r}")
    if mode == EXBODY_MODE and not isinstance(expression_goal, ExpressionGoal):
        raise ValueError("exbody mode requires an upper-body ExpressionGoal")
    if mode == FULL_BODY_MODE and not isinstance(expression_goal, FullBodyGoal):
        raise ValueError("full-body-tracking mode requires a FullBodyGoal")
    b = RewardBreakdown()
    expression_reward(s, expression_goal, w, b)
    movement_reward(s, movement_goal, w, b)
    if include_regularization:
        regularization_reward(s, s_prev, w, b)
    return b
