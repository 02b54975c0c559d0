"""Goal extraction, reference-state sampling and command sampling.

Expression goals are upper-body joint targets plus keypoint targets taken
from a retargeted clip; movement goals are root velocity / roll-pitch-yaw /
height commands. Episode initial states are sampled from the motion
library with probability proportional to clip duration, so expected
per-frame visitation is uniform over the concatenated dataset timeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curation import MotionLibrary
from .retarget import RetargetedClip
from .robot import RootPose
from .rotations import quat_to_rpy, slerp, wrap_angle, yaw_of


@dataclass
class ExpressionGoal:
    """Upper-body tracking target: 9 joint angles and 6 keypoint positions.

    ``root_position``/``root_yaw`` anchor the source frame so observations
    can express keypoint targets root-locally; rewards use world positions.
    """

    q_ref: np.ndarray  # (9,) radians
    p_ref: np.ndarray  # (18,) meters, world frame
    root_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    root_yaw: float = 0.0

    def __post_init__(self):
        if self.q_ref.shape != (9,):
            raise ValueError(f"q_ref must have 9 entries, got {self.q_ref.shape}")
        if self.p_ref.shape != (18,):
            raise ValueError(f"p_ref must have 18 entries, got {self.p_ref.shape}")


@dataclass
class FullBodyGoal:
    """Whole-body variant: all 19 joints plus upper and lower keypoints (30)."""

    q_ref: np.ndarray  # (19,)
    p_ref: np.ndarray  # (30,) = 18 upper + 12 lower
    root_position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    root_yaw: float = 0.0

    def __post_init__(self):
        if self.q_ref.shape != (19,):
            raise ValueError(f"q_ref must have 19 entries, got {self.q_ref.shape}")
        if self.p_ref.shape != (30,):
            raise ValueError(f"p_ref must have 30 entries, got {self.p_ref.shape}")


@dataclass
class MovementGoal:
    v_ref: np.ndarray  # (3,) m/s
    rpy_ref: np.ndarray  # (3,) radians; yaw is tracked via delta_yaw
    h_ref: float  # meters

    def __post_init__(self):
        if self.h_ref <= 0:
            raise ValueError("h_ref must be positive")
        self.rpy_ref = np.array([wrap_angle(a) for a in self.rpy_ref])


@dataclass
class CommandRanges:
    """Uniform sampling intervals for random root-movement commands.

    Yaw velocity is never sampled; yaw is tracked through the current/
    desired difference. Defaults are approximate, not measured.
    """

    vx: tuple[float, float] = (-1.0, 1.0)
    vy: tuple[float, float] = (-0.5, 0.5)
    roll: tuple[float, float] = (-0.4, 0.4)
    pitch: tuple[float, float] = (-0.4, 0.4)
    height: tuple[float, float] = (0.7, 1.1)

    def __post_init__(self):
        for name in ("vx", "vy", "roll", "pitch", "height"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"range {name} has min > max")


@dataclass
class InitialState:
    clip_id: str
    time_offset: float  # seconds into the clip
    frame: int
    q: np.ndarray
    dq: np.ndarray
    root: RootPose
    root_linear_velocity: np.ndarray
    root_angular_velocity: np.ndarray


def delta_yaw(current: float, desired: float) -> float:
    """Wrapped signed yaw difference current - desired, in (-pi, pi]."""
    return wrap_angle(current - desired)


def _bracket(clip: RetargetedClip, t: float) -> tuple[int, int, float]:
    if t < 0.0 or t > clip.duration + 1e-9:
        raise ValueError(f"time {t:.4f}s outside clip duration {clip.duration:.4f}s")
    u = min(t, clip.duration) * clip.frame_rate
    i0 = min(int(math.floor(u)), clip.num_frames - 1)
    i1 = min(i0 + 1, clip.num_frames - 1)
    return i0, i1, u - i0


def extract_goals(clip: RetargetedClip, t: float) -> tuple[ExpressionGoal, MovementGoal]:
    """Goals at time ``t``, linearly interpolated between bracketing frames.

    Orientation is slerped before roll/pitch/yaw extraction.
    """
    i0, i1, w = _bracket(clip, t)
    upper = clip.upper_body_indices

    q_ref = (1 - w) * clip.q[i0, upper] + w * clip.q[i1, upper]
    p_ref = (1 - w) * clip.keypoints[i0] + w * clip.keypoints[i1]
    v_ref = (1 - w) * clip.root_linear_velocity[i0] + w * clip.root_linear_velocity[i1]
    root_pos = (1 - w) * clip.root_position[i0] + w * clip.root_position[i1]
    quat = slerp(clip.root_orientation[i0], clip.root_orientation[i1], w)
    rpy_ref = quat_to_rpy(quat)

    expression = ExpressionGoal(
        q_ref=q_ref, p_ref=p_ref, root_position=root_pos, root_yaw=float(rpy_ref[2])
    )
    movement = MovementGoal(v_ref=v_ref, rpy_ref=rpy_ref, h_ref=float(root_pos[2]))
    return expression, movement


def extract_full_body_goal(clip: RetargetedClip, t: float) -> FullBodyGoal:
    i0, i1, w = _bracket(clip, t)
    q_ref = (1 - w) * clip.q[i0] + w * clip.q[i1]
    p_upper = (1 - w) * clip.keypoints[i0] + w * clip.keypoints[i1]
    p_lower = (1 - w) * clip.lower_keypoints[i0] + w * clip.lower_keypoints[i1]
    root_pos = (1 - w) * clip.root_position[i0] + w * clip.root_position[i1]
    quat = slerp(clip.root_orientation[i0], clip.root_orientation[i1], w)
    return FullBodyGoal(
        q_ref=q_ref,
        p_ref=np.concatenate([p_upper, p_lower]),
        root_position=root_pos,
        root_yaw=yaw_of(quat),
    )


def retargeted_clips(library: MotionLibrary) -> list[RetargetedClip]:
    return [c for c in library.clips.values() if isinstance(c, RetargetedClip)]


def clip_initial_state(clip: RetargetedClip, t: float) -> InitialState:
    """Full robot state at the stored frame nearest to time ``t``."""
    if t < 0.0 or t > clip.duration + 1e-9:
        raise ValueError(f"time {t:.4f}s outside clip duration {clip.duration:.4f}s")
    frame = min(int(round(t * clip.frame_rate)), clip.num_frames - 1)
    return InitialState(
        clip_id=clip.meta.id,
        time_offset=frame / clip.frame_rate,
        frame=frame,
        q=clip.q[frame].copy(),
        dq=clip.dq[frame].copy(),
        root=clip.root_pose(frame),
        root_linear_velocity=clip.root_linear_velocity[frame].copy(),
        root_angular_velocity=clip.root_angular_velocity[frame].copy(),
    )


def sample_rsi(library: MotionLibrary, rng: np.random.Generator) -> InitialState:
    """Sample a reference state: clip weighted by duration, offset uniform.

    The offset snaps to the nearest stored frame so the returned state is
    exactly a dataset state.
    """
    clips = retargeted_clips(library)
    if not clips:
        raise ValueError("library has no retargeted clips to sample from")
    durations = np.array([c.duration for c in clips])
    probs = durations / durations.sum()
    clip = clips[int(rng.choice(len(clips), p=probs))]
    return clip_initial_state(clip, float(rng.uniform(0.0, clip.duration)))


def sample_random_command(ranges: CommandRanges, rng: np.random.Generator) -> MovementGoal:
    """Independent uniform draws per field; yaw is not sampled (left at 0)."""
    return MovementGoal(
        v_ref=np.array([rng.uniform(*ranges.vx), rng.uniform(*ranges.vy), 0.0]),
        rpy_ref=np.array([rng.uniform(*ranges.roll), rng.uniform(*ranges.pitch), 0.0]),
        h_ref=float(rng.uniform(*ranges.height)),
    )
