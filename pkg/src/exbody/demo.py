"""Procedural demo motion dataset.

Generates a small library of synthetic human clips (walking in several
directions, dancing, basketball moves, punches, waves, plus a few clips
whose descriptions should be rejected by curation). The distribution is
deliberately biased toward forward walking and symmetric in sideways
walking. The source skeleton uses joint frames aligned with the robot's
(knees/ankles/elbows about y, torso about z) so hinge projection carries
the intended motion.

Everything is deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curation import MotionLibrary, curate
from .mocap import Bone, Category, ClipMeta, RawMotionClip, SkeletonDef
from .retarget import JointMapping, retarget_clip
from .robot import RobotModel, default_robot_model
from .rotations import euler_to_quat
from .retarget import default_mapping

FRAME_RATE = 60.0

_BONE_TABLE = [
    # name, parent, direction, length, dof
    ("lowerback", "root", (0, 0, 1), 0.25, ["rz"]),
    ("lfemur", "root", (0, 0, -1), 0.43, ["rx", "ry", "rz"]),
    ("ltibia", "lfemur", (0, 0, -1), 0.43, ["ry"]),
    ("lfoot", "ltibia", (1, 0, 0), 0.15, ["ry"]),
    ("rfemur", "root", (0, 0, -1), 0.43, ["rx", "ry", "rz"]),
    ("rtibia", "rfemur", (0, 0, -1), 0.43, ["ry"]),
    ("rfoot", "rtibia", (1, 0, 0), 0.15, ["ry"]),
    ("lhumerus", "lowerback", (0, 0, -1), 0.30, ["rx", "ry", "rz"]),
    ("lradius", "lhumerus", (0, 0, -1), 0.26, ["ry"]),
    ("rhumerus", "lowerback", (0, 0, -1), 0.30, ["rx", "ry", "rz"]),
    ("rradius", "rhumerus", (0, 0, -1), 0.26, ["ry"]),
]


def demo_skeleton() -> SkeletonDef:
    bones = [
        Bone("root", None, np.array([0.0, 0.0, 1.0]), 0.0, "XYZ",
             ["tx", "ty", "tz", "rx", "ry", "rz"])
    ]
    for name, parent, direction, length, dof in _BONE_TABLE:
        d = np.asarray(direction, dtype=float)
        bones.append(Bone(name, parent, d / np.linalg.norm(d), length, "XYZ", dof))
    return SkeletonDef(bones=bones, root_order=["tx", "ty", "tz", "rx", "ry", "rz"])


@dataclass
class _Channels:
    """Per-bone Euler channel arrays (radians) plus root translation."""

    n: int

    def __post_init__(self):
        self.root_t = np.zeros((self.n, 3))
        self.root_rpy = np.zeros((self.n, 3))
        self.angles: dict[str, np.ndarray] = {
            name: np.zeros((self.n, 3)) for name, *_ in _BONE_TABLE
        }

    def to_clip(self, skeleton: SkeletonDef, meta: ClipMeta) -> RawMotionClip:
        rotations = {}
        rotations["root"] = np.stack(
            [
                euler_to_quat({"x": r[0], "y": r[1], "z": r[2]}, "XYZ")
                for r in self.root_rpy
            ]
        )
        for name, a in self.angles.items():
            rotations[name] = np.stack(
                [euler_to_quat({"x": v[0], "y": v[1], "z": v[2]}, "XYZ") for v in a]
            )
        return RawMotionClip(
            skeleton=skeleton,
            frame_rate=FRAME_RATE,
            root_translation=self.root_t,
            rotations=rotations,
            meta=meta,
        )


def _time(duration: float) -> np.ndarray:
    n = int(round(duration * FRAME_RATE)) + 1
    return np.arange(n) / FRAME_RATE


def _walk(skeleton, rng, clip_id, desc, vx=0.0, vy=0.0, yaw_rate=0.0, duration=8.0):
    t = _time(duration)
    ch = _Channels(len(t))
    speed = math.hypot(vx, vy)
    freq = 0.9 + 0.5 * speed + rng.uniform(-0.05, 0.05)
    swing = 0.25 + 0.3 * speed + rng.uniform(-0.02, 0.02)
    phase = 2.0 * math.pi * freq * t

    ch.root_t[:, 0] = vx * t
    ch.root_t[:, 1] = vy * t
    ch.root_t[:, 2] = 0.95 + 0.02 * np.sin(2.0 * phase)
    ch.root_rpy[:, 2] = yaw_rate * t

    for side, sgn in (("l", 0.0), ("r", math.pi)):
        ch.angles[f"{side}femur"][:, 1] = swing * np.sin(phase + sgn)
        ch.angles[f"{side}femur"][:, 0] = 0.04 * np.sin(phase + sgn)
        ch.angles[f"{side}tibia"][:, 1] = 0.35 * (1.0 + np.sin(phase + sgn + 0.5)) / 2.0 + 0.1
        ch.angles[f"{side}foot"][:, 1] = -0.1 * np.sin(phase + sgn)
        # arms counter-swing
        ch.angles[f"{side}humerus"][:, 1] = -0.6 * swing * np.sin(phase + sgn)
        ch.angles[f"{side}radius"][:, 1] = 0.3 + 0.1 * np.sin(phase + sgn)
    return ch.to_clip(skeleton, ClipMeta(clip_id, desc, Category.WALK, 0.0))


def _dance(skeleton, rng, clip_id, desc, duration=10.0):
    t = _time(duration)
    ch = _Channels(len(t))
    f1 = 0.5 + rng.uniform(0.0, 0.1)
    w1 = 2.0 * math.pi * f1 * t
    ch.root_t[:, 1] = 0.12 * np.sin(w1)
    ch.root_t[:, 2] = 0.93 + 0.05 * np.sin(2.0 * w1)
    ch.root_rpy[:, 2] = 0.4 * np.sin(0.7 * w1)
    for side, sgn in (("l", 1.0), ("r", -1.0)):
        ch.angles[f"{side}humerus"][:, 0] = sgn * (0.7 + 0.5 * np.sin(w1 * 1.5))
        ch.angles[f"{side}humerus"][:, 1] = 0.5 * np.sin(w1 + sgn)
        ch.angles[f"{side}radius"][:, 1] = 0.6 + 0.4 * np.sin(w1 * 1.5 + sgn)
        ch.angles[f"{side}femur"][:, 1] = 0.15 * np.sin(w1 + sgn)
        ch.angles[f"{side}tibia"][:, 1] = 0.25 + 0.15 * np.sin(w1 * 2.0)
    ch.angles["lowerback"][:, 2] = 0.25 * np.sin(w1)
    return ch.to_clip(skeleton, ClipMeta(clip_id, desc, Category.DANCE, 0.0))


def _basketball(skeleton, rng, clip_id, desc, shuffle=False, duration=8.0):
    t = _time(duration)
    ch = _Channels(len(t))
    w = 2.0 * math.pi * (1.2 + rng.uniform(0.0, 0.1)) * t
    ch.root_t[:, 2] = 0.88 + 0.06 * np.sin(w)
    if shuffle:
        ch.root_t[:, 1] = 0.3 * np.sin(0.25 * w)
    for side, sgn in (("l", 0.0), ("r", math.pi)):
        ch.angles[f"{side}humerus"][:, 1] = 0.9 + 0.5 * np.sin(w + sgn)
        ch.angles[f"{side}radius"][:, 1] = 0.7 + 0.5 * np.sin(w + sgn + 1.0)
        ch.angles[f"{side}femur"][:, 1] = 0.25 * np.sin(w + sgn)
        ch.angles[f"{side}tibia"][:, 1] = 0.4 + 0.1 * np.sin(w + sgn)
    return ch.to_clip(skeleton, ClipMeta(clip_id, desc, Category.BASKETBALL, 0.0))


def _punch(skeleton, rng, clip_id, desc, duration=6.0):
    t = _time(duration)
    ch = _Channels(len(t))
    w = 2.0 * math.pi * (1.8 + rng.uniform(0.0, 0.2)) * t
    for side, sgn in (("l", 0.0), ("r", math.pi)):
        jab = np.maximum(0.0, np.sin(w + sgn))
        ch.angles[f"{side}humerus"][:, 1] = 1.1 * jab
        ch.angles[f"{side}radius"][:, 1] = 1.3 * (1.0 - jab) + 0.2
        ch.angles[f"{side}femur"][:, 1] = 0.05 * np.sin(w + sgn)
        ch.angles[f"{side}tibia"][:, 1] = 0.3
    ch.angles["lowerback"][:, 2] = 0.2 * np.sin(w)
    return ch.to_clip(skeleton, ClipMeta(clip_id, desc, Category.PUNCH, 0.0))


def _gesture(skeleton, rng, clip_id, desc, category, arms_up=False, squat=False, duration=6.0):
    t = _time(duration)
    ch = _Channels(len(t))
    w = 2.0 * math.pi * (0.8 + rng.uniform(0.0, 0.1)) * t
    ch.root_t[:, 2] = 0.95 - (0.18 * (1.0 + np.sin(w)) / 2.0 if squat else 0.0)
    lift = 1.4 if arms_up else 0.6
    ch.angles["rhumerus"][:, 1] = lift + 0.3 * np.sin(w * 1.5)
    ch.angles["rradius"][:, 1] = 0.5 + 0.4 * np.sin(w * 2.0)
    ch.angles["lhumerus"][:, 0] = 0.3 if arms_up else 0.1
    if squat:
        for side in "lr":
            ch.angles[f"{side}femur"][:, 1] = -0.5 * (1.0 + np.sin(w)) / 2.0
            ch.angles[f"{side}tibia"][:, 1] = 1.0 * (1.0 + np.sin(w)) / 2.0 + 0.1
    return ch.to_clip(skeleton, ClipMeta(clip_id, desc, category, 0.0))


def _roster(rng, skeleton, roster: str):
    walks = [
        ("walk_fwd_01", "subject walks forward at a brisk pace", dict(vx=1.2)),
        ("walk_fwd_02", "walking forward, relaxed", dict(vx=0.8)),
        ("walk_fwd_03", "walk forward with long strides", dict(vx=1.4)),
        ("walk_fwd_04", "forward walk, slow", dict(vx=0.5)),
        ("walk_fwd_05", "walking ahead steadily", dict(vx=1.0)),
        ("walk_fwd_06", "brisk walk forward swinging arms", dict(vx=1.3)),
        ("walk_back_01", "walking backwards carefully", dict(vx=-0.5)),
        ("walk_back_02", "walk backward slowly", dict(vx=-0.35)),
        ("walk_side_l", "walk sideways stepping to the left", dict(vy=0.45)),
        ("walk_side_r", "walk sideways stepping to the right", dict(vy=-0.45)),
        ("walk_turn_l", "walk forward then navigate a left turn", dict(vx=0.9, yaw_rate=0.5)),
        ("walk_turn_r", "walk forward then navigate a right turn", dict(vx=0.9, yaw_rate=-0.5)),
    ]
    clips = [_walk(skeleton, rng, cid, desc, **kw) for cid, desc, kw in walks]
    clips.append(_dance(skeleton, rng, "dance_01", "russian dance"))
    if roster == "full":
        clips.append(_dance(skeleton, rng, "dance_02", "salsa dance with arm waves"))
        clips.append(_dance(skeleton, rng, "dance_03", "slow dance, swaying"))
        clips.append(_basketball(skeleton, rng, "bball_01", "basketball dribble and signals"))
        clips.append(_basketball(skeleton, rng, "bball_02", "basketball defensive shuffle", shuffle=True))
        clips.append(_punch(skeleton, rng, "punch_01", "punch combination, jab and cross"))
        clips.append(_punch(skeleton, rng, "punch_02", "quick punches while stepping"))
    clips.append(
        _gesture(skeleton, rng, "wave_01", "stand and wave hello", Category.OTHERS)
    )
    if roster == "full":
        clips.append(
            _gesture(skeleton, rng, "squat_01", "squat down and stand up", Category.OTHERS, squat=True)
        )
        clips.append(
            _gesture(skeleton, rng, "stretch_01", "arm strech and bend to the side", Category.OTHERS, arms_up=True)
        )
        clips.append(
            _gesture(skeleton, rng, "balance_01", "balance on one leg with arms out", Category.OTHERS, arms_up=True)
        )
        # description decoys that curation must reject
        clips.append(_walk(skeleton, rng, "reject_stairs", "walk up a stairway", vx=0.5, duration=4.0))
        clips.append(_walk(skeleton, rng, "reject_terrain", "walk on uneven terrain", vx=0.6, duration=4.0))
        clips.append(_gesture(skeleton, rng, "reject_ladder", "climb a ladder carefully", Category.OTHERS, duration=4.0))
        clips.append(_gesture(skeleton, rng, "reject_box", "sit down on a box and stand", Category.OTHERS, duration=4.0))
        clips.append(_gesture(skeleton, rng, "reject_handstand", "handstand practice", Category.OTHERS, duration=4.0))
        clips.append(_gesture(skeleton, rng, "test_highfive", "high five a friend", Category.TEST, duration=5.0))
        clips.append(_gesture(skeleton, rng, "test_hug", "hug greeting", Category.TEST, duration=5.0))
    return clips


def build_demo_raw_library(seed: int = 0, roster: str = "full") -> MotionLibrary:
    """Raw (human) clips, uncurated: descriptions include curation decoys."""
    rng = np.random.default_rng(seed)
    skeleton = demo_skeleton()
    return MotionLibrary.from_clips(_roster(rng, skeleton, roster))


def build_demo_library(
    seed: int = 0,
    roster: str = "full",
    model: RobotModel | None = None,
    mapping: JointMapping | None = None,
    curated: bool = True,
) -> MotionLibrary:
    """Curated and retargeted demo library, ready for goal extraction."""
    model = model or default_robot_model()
    mapping = mapping or default_mapping(model)
    raw = build_demo_raw_library(seed, roster)
    if curated:
        raw = curate(raw)
    out = MotionLibrary()
    out.report = dict(raw.report)
    for clip_id, clip in raw.clips.items():
        out.clips[clip_id] = retarget_clip(clip, mapping, model)
    return out
