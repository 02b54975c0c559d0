"""Goal-conditioned control environment on simplified stand-in dynamics.

Two backends, both deliberately non-physical substitutes for a full rigid
body simulator:

- ``kinematic-replay``: joints move toward the PD target with a first-order
  lag and the root integrates the commanded movement goal. Contacts are
  synthesized from foot height. Used to validate goal/reward plumbing: an
  oracle action stream (the clip's own joint angles) must track near the
  reward maximum.

- ``planar-biped``: a sagittal-plane toy (root mass, two telescoping legs
  on ground-contact springs, one arm joint coupled into the lean) that is
  unstable enough that balance and velocity tracking have to be learned.

The observation deliberately excludes root linear velocity, absolute
height and absolute yaw; only the yaw difference to the commanded yaw is
visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curation import MotionLibrary
from .goals import (
    CommandRanges,
    ExpressionGoal,
    FullBodyGoal,
    InitialState,
    MovementGoal,
    delta_yaw,
    extract_full_body_goal,
    extract_goals,
    retargeted_clips,
    sample_random_command,
    sample_rsi,
)
from .retarget import RetargetedClip
from .rewards import (
    EXBODY_MODE,
    FULL_BODY_MODE,
    EnvStateSnapshot,
    RewardBreakdown,
    RewardWeights,
    total_reward,
)
from .robot import NUM_JOINTS, RobotModel, RootPose, _frames
from .rotations import quat_conjugate, quat_rotate, rpy_to_quat, wrap_angle

GRAVITY = 9.81

REPLAY_BACKEND = "kinematic-replay"
PLANAR_BACKEND = "planar-biped"

# Observation layout (exbody mode), total 96:
#   root angular velocity (3), roll (1), pitch (1), delta yaw (1),
#   q (19), dq (19), previous action (19),
#   expression goal: q_ref (9), p_ref root-local (18),
#   movement command: v_ref (3), roll_ref, pitch_ref (2), h_ref (1)
OBS_DIM_EXBODY = 96
OBS_DIM_FULL_BODY = 118


@dataclass
class PDController:
    kp: np.ndarray  # (19,) N*m/rad
    kd: np.ndarray  # (19,) N*m*s/rad
    torque_limit: np.ndarray  # (19,) N*m

    def __post_init__(self):
        if np.any(self.kp <= 0) or np.any(self.kd <= 0):
            raise ValueError("PD gains must be positive")

    @staticmethod
    def default(model: RobotModel, kp_legs: float = 60.0, kp_arms: float = 40.0,
                kd: float = 2.0) -> "PDController":
        kp = np.full(NUM_JOINTS, kp_arms)
        kp[model.lower_body_indices] = kp_legs
        limit = np.full(NUM_JOINTS, 60.0)
        limit[model.lower_body_indices] = 200.0
        return PDController(kp=kp, kd=np.full(NUM_JOINTS, kd), torque_limit=limit)


def pd_torque(target: np.ndarray, q: np.ndarray, dq: np.ndarray, pd: PDController) -> np.ndarray:
    """tau_i = kp_i (target_i - q_i) - kd_i dq_i, clamped to the torque limits."""
    if target.shape != (NUM_JOINTS,) or q.shape != (NUM_JOINTS,) or dq.shape != (NUM_JOINTS,):
        raise ValueError("pd_torque expects 19-vectors")
    tau = pd.kp * (target - q) - pd.kd * dq
    return np.clip(tau, -pd.torque_limit, pd.torque_limit)


@dataclass
class EnvConfig:
    physics_dt: float = 0.005
    decimation: int = 4
    episode_s: float = 20.0
    max_roll: float = 1.0
    max_pitch: float = 1.0
    min_root_height: float = 0.4
    backend: str = REPLAY_BACKEND
    rsi: bool = True
    reward_mode: str = EXBODY_MODE
    goal_source: str = "dataset"  # or "random-command"
    include_regularization: bool = True
    joint_lag_tau: float = 0.02
    root_lag_tau: float = 0.02
    contact_eps: float = 0.02
    kp_legs: float = 60.0
    kp_arms: float = 40.0
    kd: float = 2.0
    command_ranges: CommandRanges = field(default_factory=CommandRanges)

    def __post_init__(self):
        if self.physics_dt <= 0:
            raise ValueError("physics_dt must be positive")
        if self.decimation < 1:
            raise ValueError("decimation must be >= 1")
        if self.backend not in (REPLAY_BACKEND, PLANAR_BACKEND):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.reward_mode not in (EXBODY_MODE, FULL_BODY_MODE):
            raise ValueError(f"unknown reward mode {self.reward_mode!r}")

    @property
    def control_dt(self) -> float:
        return self.physics_dt * self.decimation

    @property
    def max_steps(self) -> int:
        return int(round(self.episode_s / self.control_dt))


def observation_dim(mode: str = EXBODY_MODE) -> int:
    return OBS_DIM_EXBODY if mode == EXBODY_MODE else OBS_DIM_FULL_BODY


def build_observation(
    s: EnvStateSnapshot,
    expression_goal: ExpressionGoal | FullBodyGoal,
    movement_goal: MovementGoal,
    prev_action: np.ndarray,
) -> np.ndarray:
    """Assemble the policy observation. Privileged state (root linear
    velocity, absolute height, absolute yaw) never enters; keypoint targets
    are expressed relative to their source-frame root."""
    dy = delta_yaw(s.yaw, float(movement_goal.rpy_ref[2]))
    p_local = _root_local_points(expression_goal)
    return np.concatenate(
        [
            s.root_ang_vel,
            [s.roll, s.pitch, dy],
            s.q,
            s.dq,
            prev_action,
            expression_goal.q_ref,
            p_local,
            movement_goal.v_ref,
            movement_goal.rpy_ref[:2],
            [movement_goal.h_ref],
        ]
    )


def _root_local_points(goal: ExpressionGoal | FullBodyGoal) -> np.ndarray:
    pts = goal.p_ref.reshape(-1, 3) - goal.root_position
    c, sn = math.cos(-goal.root_yaw), math.sin(-goal.root_yaw)
    out = np.empty_like(pts)
    out[:, 0] = c * pts[:, 0] - sn * pts[:, 1]
    out[:, 1] = sn * pts[:, 0] + c * pts[:, 1]
    out[:, 2] = pts[:, 2]
    return out.ravel()


class FootContactTracker:
    """Air-time bookkeeping at control rate. The air-time value reported at
    a landing step is the completed airborne duration; it resets to zero
    while the foot stays planted."""

    def __init__(self, initially_in_contact: bool = True):
        self.air_time = np.zeros(2)
        self.was_in_contact = np.array([initially_in_contact] * 2)

    def update(self, in_contact: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
        new_contact = in_contact & ~self.was_in_contact
        report = np.zeros(2)
        for i in range(2):
            if in_contact[i]:
                report[i] = self.air_time[i] if new_contact[i] else 0.0
                self.air_time[i] = 0.0
            else:
                self.air_time[i] += dt
                report[i] = self.air_time[i]
        self.was_in_contact = in_contact.copy()
        return report, new_contact


def _projected_gravity_xy(orientation: np.ndarray) -> np.ndarray:
    g_body = quat_rotate(quat_conjugate(orientation), np.array([0.0, 0.0, -1.0]))
    return g_body[:2]


class ReplayBackend:
    """Joints lag toward the PD target; the root integrates the commanded
    movement goal. PD torques are computed for the energy term but do not
    drive the kinematics."""

    def __init__(self, model: RobotModel, config: EnvConfig):
        self.model = model
        self.config = config
        self.pd = PDController.default(model, config.kp_legs, config.kp_arms, config.kd)
        self.tracker = FootContactTracker()
        self.reset_default()

    def reset_default(self) -> None:
        self._set_state(
            q=self.model.default_pose.copy(),
            dq=np.zeros(NUM_JOINTS),
            root=RootPose(
                np.array([0.0, 0.0, self.model.nominal_root_height]),
                np.array([0.0, 0.0, 0.0, 1.0]),
            ),
            v=np.zeros(3),
            omega=np.zeros(3),
        )

    def reset_to(self, init: InitialState) -> None:
        self._set_state(
            q=init.q.copy(), dq=init.dq.copy(),
            root=RootPose(init.root.position.copy(), init.root.orientation.copy()),
            v=init.root_linear_velocity.copy(), omega=init.root_angular_velocity.copy(),
        )

    def _set_state(self, q, dq, root, v, omega) -> None:
        self.q = q
        self.dq = dq  # control-rate estimate reported in snapshots
        self.ddq = np.zeros(NUM_JOINTS)
        self._q_ctrl_prev = q.copy()
        self._stepped = False
        self.rpy = root.rpy.copy()
        self.root_position = root.position.copy()
        self.root_orientation = root.orientation.copy()
        self.v = v
        self.omega = omega
        self.torque = np.zeros(NUM_JOINTS)
        self.tracker = FootContactTracker()
        self._prev_feet = self._foot_positions()

    def _foot_positions(self, frames=None) -> np.ndarray:
        if frames is None:
            frames = _frames(
                self.model, RootPose(self.root_position, self.root_orientation), self.q
            )
        pos, quat = frames
        out = np.empty((2, 3))
        for k, p in enumerate(self.model.feet):
            j = self.model.joint_index(p.joint)
            out[k] = pos[j] + quat_rotate(quat[j], p.offset)
        return out

    def substep(self, target: np.ndarray, goal: MovementGoal, dt: float) -> None:
        self.torque = pd_torque(target, self.q, self.dq, self.pd)
        alpha = 1.0 - math.exp(-dt / self.config.joint_lag_tau)
        self.q = self.q + (target - self.q) * alpha
        self._stepped = True

        beta = 1.0 - math.exp(-dt / self.config.root_lag_tau)
        pos_new = self.root_position.copy()
        pos_new[:2] += goal.v_ref[:2] * dt
        pos_new[2] += (goal.h_ref - pos_new[2]) * beta
        rpy_new = self.rpy.copy()
        rpy_new[0] += wrap_angle(goal.rpy_ref[0] - rpy_new[0]) * beta
        rpy_new[1] += wrap_angle(goal.rpy_ref[1] - rpy_new[1]) * beta
        rpy_new[2] += wrap_angle(goal.rpy_ref[2] - rpy_new[2]) * beta
        self.v = (pos_new - self.root_position) / dt
        self.omega = np.array([wrap_angle(b - a) / dt for a, b in zip(self.rpy, rpy_new)])
        self.root_position = pos_new
        self.rpy = rpy_new
        self.root_orientation = rpy_to_quat(*rpy_new)

    def control_snapshot(self, action, prev_action, control_dt, want_lower: bool) -> EnvStateSnapshot:
        if self._stepped:
            dq_new = (self.q - self._q_ctrl_prev) / control_dt
            self.ddq = (dq_new - self.dq) / control_dt
            self.dq = dq_new
            self._q_ctrl_prev = self.q.copy()
            self._stepped = False
        root = RootPose(self.root_position, self.root_orientation)
        frames = _frames(self.model, root, self.q)
        feet = self._foot_positions(frames)
        foot_velocity = (feet - self._prev_feet) / control_dt
        self._prev_feet = feet
        in_contact = feet[:, 2] < self.config.contact_eps
        air, new_contact = self.tracker.update(in_contact, control_dt)
        forces = np.zeros((2, 3))
        n_contact = int(in_contact.sum())
        if n_contact:
            forces[in_contact, 2] = self.model.mass * GRAVITY / n_contact
        return _assemble_snapshot(
            self.model, self.config, self.q, self.dq, self.ddq,
            root, self.v, self.omega,
            feet[:, 2], air, new_contact, in_contact, forces, foot_velocity,
            action, prev_action, self.torque, control_dt, want_lower,
            frames=frames,
        )


class PlanarBipedBackend:
    """Sagittal-plane toy: point-mass root with pitch inertia, two massless
    telescoping legs on ground springs attached fore/aft of the root, and
    the left shoulder pitch shifting the balance point. Kept deliberately
    small; constants are tuned for learnability, not realism."""

    HIP_DX = 0.15  # legs attach at +/- this body-frame x offset
    PITCH_INERTIA = 8.0
    K_GROUND = 20000.0
    C_GROUND = 1000.0
    K_UNSTABLE = 12.0  # top-heavy destabilization, rad/s^2 per sin(lean)
    ARM_LEAN = 0.1  # arm joint angle -> effective lean offset
    ANKLE_GAIN = 60.0  # N*m per rad of ankle command
    DRAG_X = 0.5
    PITCH_DAMPING = 3.0
    KNEE_EXTENSION = 0.35  # leg shortening per rad of knee command
    LEG_LAG_TAU = 0.05
    MAX_LEG_ANGLE = 0.7

    def __init__(self, model: RobotModel, config: EnvConfig):
        self.model = model
        self.config = config
        self.pd = PDController.default(model, config.kp_legs, config.kp_arms, config.kd)
        idx = model.joint_index
        self._knees = (idx("left_knee"), idx("right_knee"))
        self._hips = (idx("left_hip_pitch"), idx("right_hip_pitch"))
        self._ankles = (idx("left_ankle"), idx("right_ankle"))
        self._arm = idx("left_shoulder_pitch")
        d = model.default_pose
        self._default_knee = float(d[self._knees[0]])
        self._default_hip = float(d[self._hips[0]])
        self._default_ankle = float(d[self._ankles[0]])
        # rest length chosen so the default knee angle stands at nominal height
        self.leg_rest = model.nominal_root_height + self.KNEE_EXTENSION * self._default_knee
        self.reset_default()

    def reset_default(self) -> None:
        q = self.model.default_pose.copy()
        self._set_state(q, np.zeros(NUM_JOINTS), x=0.0, z=self.model.nominal_root_height,
                        pitch=0.0, vx=0.0, vz=0.0, dpitch=0.0)

    def reset_to(self, init: InitialState) -> None:
        rpy = init.root.rpy
        self._set_state(
            init.q.copy(), init.dq.copy(),
            x=float(init.root.position[0]), z=float(init.root.position[2]),
            pitch=float(rpy[1]), vx=float(init.root_linear_velocity[0]),
            vz=float(init.root_linear_velocity[2]),
            dpitch=float(init.root_angular_velocity[1]),
        )

    def _set_state(self, q, dq, x, z, pitch, vx, vz, dpitch) -> None:
        self.q, self.dq = q, dq
        self.ddq = np.zeros(NUM_JOINTS)
        self.x, self.z, self.pitch = x, z, pitch
        self.vx, self.vz, self.dpitch = vx, vz, dpitch
        self.leg_len = np.full(2, self._leg_command(q)[0].mean())
        self.leg_angle = np.zeros(2)
        self.torque = np.zeros(NUM_JOINTS)
        self.normal_force = np.zeros(2)
        self.tracker = FootContactTracker()
        self._prev_feet_z = self._feet_z()

    def _leg_command(self, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lengths = np.array(
            [self.leg_rest - self.KNEE_EXTENSION * target[k] for k in self._knees]
        )
        angles = np.array(
            [target[h] - self._default_hip for h in self._hips]
        )
        return np.clip(lengths, 0.4, 1.2), np.clip(angles, -self.MAX_LEG_ANGLE, self.MAX_LEG_ANGLE)

    def _feet_z(self) -> np.ndarray:
        hip_z = self.z + np.array([+1.0, -1.0]) * self.HIP_DX * math.sin(self.pitch)
        return hip_z - self.leg_len * np.cos(self.leg_angle)

    def substep(self, target: np.ndarray, goal: MovementGoal, dt: float) -> None:
        self.torque = pd_torque(target, self.q, self.dq, self.pd)
        alpha = 1.0 - math.exp(-dt / self.config.joint_lag_tau)
        q_new = self.q + (target - self.q) * alpha
        dq_new = (q_new - self.q) / dt
        self.ddq = (dq_new - self.dq) / dt
        self.q, self.dq = q_new, dq_new

        leg_alpha = 1.0 - math.exp(-dt / self.LEG_LAG_TAU)
        cmd_len, cmd_ang = self._leg_command(target)
        prev_len = self.leg_len.copy()
        self.leg_len += (cmd_len - self.leg_len) * leg_alpha
        self.leg_angle += (cmd_ang - self.leg_angle) * leg_alpha
        dlen = (self.leg_len - prev_len) / dt

        sign = np.array([+1.0, -1.0])
        feet_z = self._feet_z()
        pen = np.maximum(0.0, -feet_z)
        foot_vz = self.vz + sign * self.HIP_DX * math.cos(self.pitch) * self.dpitch - dlen
        normal = np.where(pen > 0.0, np.maximum(0.0, self.K_GROUND * pen - self.C_GROUND * foot_vz), 0.0)
        self.normal_force = normal

        push = normal * np.tan(self.leg_angle)
        fx = float(push.sum())
        ax = fx / self.model.mass - self.DRAG_X * self.vx
        az = float(normal.sum()) / self.model.mass - GRAVITY

        lean = self.pitch + self.ARM_LEAN * (self.q[self._arm] - 0.0)
        lever_x = sign * self.HIP_DX * math.cos(self.pitch)
        torque_y = float(np.sum(-lever_x * normal)) - fx * self.z
        contact_frac = float((normal > 0).sum()) / 2.0
        ankle_cmd = 0.5 * sum(target[a] - self._default_ankle for a in self._ankles)
        torque_y -= self.ANKLE_GAIN * ankle_cmd * contact_frac
        apitch = (
            self.K_UNSTABLE * math.sin(lean)
            + torque_y / self.PITCH_INERTIA
            - self.PITCH_DAMPING * self.dpitch
        )

        self.vx += ax * dt
        self.vz += az * dt
        self.dpitch += apitch * dt
        self.vx = float(np.clip(self.vx, -10.0, 10.0))
        self.vz = float(np.clip(self.vz, -10.0, 10.0))
        self.dpitch = float(np.clip(self.dpitch, -20.0, 20.0))
        self.x += self.vx * dt
        self.z += self.vz * dt
        self.pitch += self.dpitch * dt

    def control_snapshot(self, action, prev_action, control_dt, want_lower: bool) -> EnvStateSnapshot:
        feet_z = self._feet_z()
        foot_vz = (feet_z - self._prev_feet_z) / control_dt
        self._prev_feet_z = feet_z
        foot_velocity = np.zeros((2, 3))
        foot_velocity[:, 0] = self.vx
        foot_velocity[:, 2] = foot_vz
        in_contact = self.normal_force > 0.0
        air, new_contact = self.tracker.update(in_contact, control_dt)
        forces = np.zeros((2, 3))
        forces[:, 2] = self.normal_force
        root = RootPose(np.array([self.x, 0.0, self.z]), rpy_to_quat(0.0, self.pitch, 0.0))
        return _assemble_snapshot(
            self.model, self.config, self.q, self.dq, self.ddq, root,
            np.array([self.vx, 0.0, self.vz]), np.array([0.0, self.dpitch, 0.0]),
            feet_z, air, new_contact, in_contact, forces, foot_velocity,
            action, prev_action, self.torque, control_dt, want_lower,
        )


def _assemble_snapshot(
    model, config, q, dq, ddq, root, v, omega, feet_z, air, new_contact,
    in_contact, forces, foot_velocity, action, prev_action, torque,
    control_dt, want_lower, frames=None,
) -> EnvStateSnapshot:
    pos, quat = frames if frames is not None else _frames(model, root, q)
    keypoints = np.empty(18)
    for k, p in enumerate(model.keypoints):
        j = model._kp_joint[k]
        keypoints[3 * k : 3 * k + 3] = pos[j] + quat_rotate(quat[j], p.offset)
    lower = None
    if want_lower:
        lower = np.empty(12)
        for k, p in enumerate(model.lower_keypoints):
            j = model.joint_index(p.joint)
            lower[3 * k : 3 * k + 3] = pos[j] + quat_rotate(quat[j], p.offset)
    rpy = root.rpy
    return EnvStateSnapshot(
        q=q.copy(), dq=dq.copy(), ddq=ddq.copy(),
        root_lin_vel=v.copy(),
        roll=float(rpy[0]), pitch=float(rpy[1]), yaw=float(rpy[2]),
        root_height=float(root.position[2]),
        root_position=root.position.copy(),
        keypoints=keypoints,
        foot_heights=feet_z.copy(),
        foot_air_time=air,
        foot_new_contact=new_contact,
        foot_in_contact=in_contact.copy(),
        foot_contact_force=forces,
        foot_velocity=foot_velocity,
        action=action.copy(), prev_action=prev_action.copy(),
        self_collision=False,
        projected_gravity_xy=_projected_gravity_xy(root.orientation),
        default_pose_lower=model.default_pose[model.lower_body_indices].copy(),
        lower_body_indices=model.lower_body_indices,
        upper_body_indices=model.upper_body_indices,
        joint_limit_lower=model.lower_limits,
        joint_limit_upper=model.upper_limits,
        torque=torque.copy(),
        lower_keypoints=lower,
        root_ang_vel=omega.copy(),
        control_dt=control_dt,
    )


class HumanoidEnv:
    """Single-instance environment; own it from one thread only. Run many
    instances with independent RNG streams for parallel rollouts."""

    def __init__(
        self,
        model: RobotModel,
        library: MotionLibrary,
        config: EnvConfig | None = None,
        weights: RewardWeights | None = None,
    ):
        self.model = model
        self.config = config or EnvConfig()
        self.weights = weights or RewardWeights()
        self.clips = retargeted_clips(library)
        if not self.clips:
            raise ValueError("library contains no retargeted clips")
        self.library = library
        if self.config.backend == REPLAY_BACKEND:
            self.backend = ReplayBackend(model, self.config)
        else:
            self.backend = PlanarBipedBackend(model, self.config)
        self._clip: RetargetedClip | None = None
        self._goal_time = 0.0
        self._step_count = 0
        self._prev_action = np.zeros(NUM_JOINTS)
        self._prev_snapshot: EnvStateSnapshot | None = None
        self._random_command: MovementGoal | None = None

    @property
    def observation_dim(self) -> int:
        return observation_dim(self.config.reward_mode)

    @property
    def action_dim(self) -> int:
        return NUM_JOINTS

    def reset(self, rng: np.random.Generator, start: InitialState | None = None) -> np.ndarray:
        init = start if start is not None else sample_rsi(self.library, rng)
        self._clip = self.library.clips[init.clip_id]
        self._goal_time = init.time_offset
        if self.config.rsi:
            self.backend.reset_to(init)
        else:
            self.backend.reset_default()
        self._step_count = 0
        self._prev_action = np.zeros(NUM_JOINTS)
        snapshot = self.backend.control_snapshot(
            np.zeros(NUM_JOINTS), self._prev_action, self.config.control_dt,
            want_lower=self.config.reward_mode == FULL_BODY_MODE,
        )
        if self.config.goal_source == "random-command":
            cmd = sample_random_command(self.config.command_ranges, rng)
            # yaw is not sampled: command the current heading
            cmd.rpy_ref[2] = snapshot.yaw
            self._random_command = cmd
        else:
            self._random_command = None
        self._prev_snapshot = snapshot
        e_goal, m_goal = self._goals()
        return build_observation(snapshot, e_goal, m_goal, self._prev_action)

    def _goals(self) -> tuple[ExpressionGoal | FullBodyGoal, MovementGoal]:
        t = min(self._goal_time, self._clip.duration)
        if self.config.reward_mode == FULL_BODY_MODE:
            e_goal = extract_full_body_goal(self._clip, t)
            _, m_goal = extract_goals(self._clip, t)
        else:
            e_goal, m_goal = extract_goals(self._clip, t)
        if self._random_command is not None:
            m_goal = self._random_command
        return e_goal, m_goal

    def step(self, action: np.ndarray) -> tuple[np.ndarray, RewardBreakdown, bool, dict]:
        if self._clip is None:
            raise RuntimeError("call reset() before step()")
        action = np.asarray(action, dtype=float)
        if action.shape != (NUM_JOINTS,):
            raise ValueError(f"action must be a {NUM_JOINTS}-vector, got shape {action.shape}")
        if not np.all(np.isfinite(action)):
            raise ValueError("action contains NaN or infinity")

        e_goal, m_goal = self._goals()
        for _ in range(self.config.decimation):
            self.backend.substep(action, m_goal, self.config.physics_dt)
        self._goal_time += self.config.control_dt
        self._step_count += 1

        snapshot = self.backend.control_snapshot(
            action, self._prev_action, self.config.control_dt,
            want_lower=self.config.reward_mode == FULL_BODY_MODE,
        )
        e_goal, m_goal = self._goals()
        breakdown = total_reward(
            snapshot, self._prev_snapshot, e_goal, m_goal, self.weights,
            mode=self.config.reward_mode,
            include_regularization=self.config.include_regularization,
        )

        done, reason = self._termination(snapshot)
        obs = build_observation(snapshot, e_goal, m_goal, action)
        info = {
            "breakdown": breakdown,
            "clip_id": self._clip.meta.id,
            "clip_time": min(self._goal_time, self._clip.duration),
            "time": self._step_count * self.config.control_dt,
            "done_reason": reason,
            "snapshot": snapshot,
        }
        self._prev_snapshot = snapshot
        self._prev_action = action.copy()
        return obs, breakdown, done, info

    def _termination(self, s: EnvStateSnapshot) -> tuple[bool, str | None]:
        if abs(s.roll) > self.config.max_roll or abs(s.pitch) > self.config.max_pitch:
            return True, "orientation"
        if s.root_height < self.config.min_root_height:
            return True, "height"
        if self._step_count >= self.config.max_steps:
            return True, "timeout"
        return False, None


def make_oracle_policy(env: "HumanoidEnv"):
    """Zero-argument action source feeding the active clip's own joint
    angles, sampled at the goal time the next step will be scored against."""

    def oracle() -> np.ndarray:
        clip = env._clip
        t = min(env._goal_time + env.config.control_dt, clip.duration)
        u = t * clip.frame_rate
        i0 = min(int(math.floor(u)), clip.num_frames - 1)
        i1 = min(i0 + 1, clip.num_frames - 1)
        w = u - i0
        return (1.0 - w) * clip.q[i0] + w * clip.q[i1]

    return oracle


class VectorEnv:
    """N independent env instances with per-instance RNG streams.

    Auto-resets finished instances; the info dict of a finished step carries
    the terminal info under "final".
    """

    def __init__(self, envs: list[HumanoidEnv], seed: int):
        self.envs = envs
        streams = np.random.SeedSequence(seed).spawn(len(envs))
        self.rngs = [np.random.default_rng(s) for s in streams]

    def __len__(self) -> int:
        return len(self.envs)

    def reset_all(self) -> np.ndarray:
        return np.stack([env.reset(rng) for env, rng in zip(self.envs, self.rngs)])

    def step(self, actions: np.ndarray):
        obs, rewards, dones, infos = [], [], [], []
        for i, env in enumerate(self.envs):
            o, breakdown, done, info = env.step(actions[i])
            if done:
                o = env.reset(self.rngs[i])
            obs.append(o)
            rewards.append(breakdown.total)
            dones.append(done)
            infos.append(info)
        return np.stack(obs), np.array(rewards), np.array(dones), infos
