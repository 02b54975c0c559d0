"""Parsers for CMU-style hierarchical skeleton and motion files.

A skeleton file has ``:units``, ``:root``, ``:bonedata`` and ``:hierarchy``
sections; a motion file is a list of frames, each a frame index followed by
one line per bone with that bone's channel values.

Angles are converted to radians and lengths to meters at parse time using
the file's declared scale; nothing downstream ever sees file units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .rotations import euler_to_quat, identity_quat, quat_mul, quat_normalize, quat_rotate

_ROT_CHANNELS = ("rx", "ry", "rz")
_TRANS_CHANNELS = ("tx", "ty", "tz")
_VALID_CHANNELS = _ROT_CHANNELS + _TRANS_CHANNELS

ROOT_BONE = "root"


class ParseError(ValueError):
    """Syntax or structure error in a skeleton/motion file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Category(str, Enum):
    WALK = "walk"
    DANCE = "dance"
    BASKETBALL = "basketball"
    PUNCH = "punch"
    OTHERS = "others"
    TEST = "test"


@dataclass
class ClipMeta:
    id: str
    description: str = ""
    category: Category = Category.OTHERS
    duration: float = 0.0


@dataclass
class Bone:
    name: str
    parent: str | None  # None only for the root
    direction: np.ndarray  # unit vector
    length: float  # meters
    axis_order: str  # Euler composition order for this bone's channels
    dof: list[str]  # channel names in file order, e.g. ["rx", "rz"]


@dataclass
class SkeletonDef:
    bones: list[Bone]  # topological order, root first
    root_order: list[str]  # channel order of the root line in motion files
    length_scale: float = 1.0  # file length unit -> meters
    angle_degrees: bool = True  # file angles in degrees
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {b.name: i for i, b in enumerate(self.bones)}
        roots = [b for b in self.bones if b.parent is None]
        if len(roots) != 1:
            raise ParseError(f"expected exactly one root bone, found {len(roots)}")
        for i, b in enumerate(self.bones):
            if b.parent is not None and self._index.get(b.parent, len(self.bones)) >= i:
                raise ParseError(f"bone table not topologically ordered at {b.name!r}")
            if abs(np.linalg.norm(b.direction) - 1.0) > 1e-6:
                raise ParseError(f"direction of bone {b.name!r} is not unit-norm")
            if b.length < 0:
                raise ParseError(f"negative length for bone {b.name!r}")

    def bone(self, name: str) -> Bone:
        try:
            return self.bones[self._index[name]]
        except KeyError:
            raise KeyError(f"unknown bone {name!r}") from None

    def has_bone(self, name: str) -> bool:
        return name in self._index


@dataclass
class RawMotionClip:
    skeleton: SkeletonDef
    frame_rate: float
    root_translation: np.ndarray  # (N, 3) meters
    rotations: dict[str, np.ndarray]  # bone name -> (N, 4) unit quaternions
    meta: ClipMeta

    def __post_init__(self):
        n = self.root_translation.shape[0]
        if n < 2:
            raise ValueError("a motion clip needs at least 2 frames")
        if self.frame_rate <= 0:
            raise ValueError("frame rate must be positive")
        for name, quats in self.rotations.items():
            if quats.shape != (n, 4):
                raise ValueError(f"rotation array for {name!r} has shape {quats.shape}")
            norms = np.linalg.norm(quats, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-6):
                raise ValueError(f"non-unit quaternion in bone {name!r}")
        expected = (n - 1) / self.frame_rate
        if self.meta.duration == 0.0:
            self.meta.duration = expected
        elif abs(self.meta.duration - expected) > 1.0 / self.frame_rate:
            raise ValueError(
                f"meta duration {self.meta.duration:.4f}s inconsistent with "
                f"{n} frames at {self.frame_rate} Hz"
            )

    @property
    def num_frames(self) -> int:
        return self.root_translation.shape[0]

    @property
    def duration(self) -> float:
        return (self.num_frames - 1) / self.frame_rate


# --------------------------------------------------------------------------
# skeleton files
# --------------------------------------------------------------------------


def _tokenize(text: str | bytes) -> list[tuple[int, list[str]]]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((lineno, line.split()))
    return out


def parse_skeleton(text: str | bytes) -> SkeletonDef:
    """Parse a hierarchical skeleton definition into a SkeletonDef."""
    lines = _tokenize(text)
    length_scale = 1.0
    angle_degrees = True
    root_order: list[str] = ["tx", "ty", "tz", "rx", "ry", "rz"]
    root_axis_order = "XYZ"
    bones: dict[str, Bone] = {}
    children: dict[str, list[str]] = {}

    i = 0
    section = None
    while i < len(lines):
        lineno, toks = lines[i]
        if toks[0].startswith(":"):
            section = toks[0][1:].lower()
            i += 1
            continue
        if section == "units":
            key = toks[0].lower()
            if key == "length":
                length_scale = float(toks[1])
            elif key == "angle":
                angle_degrees = toks[1].lower().startswith("deg")
            i += 1
        elif section == "root":
            key = toks[0].lower()
            if key == "order":
                root_order = [t.lower() for t in toks[1:]]
                bad = [c for c in root_order if c not in _VALID_CHANNELS]
                if bad:
                    raise ParseError(f"unknown root channel {bad[0]!r}", lineno)
            elif key == "axis":
                root_axis_order = toks[1].upper()
            i += 1
        elif section == "bonedata":
            if toks[0].lower() != "begin":
                raise ParseError(f"expected 'begin' in bonedata, got {toks[0]!r}", lineno)
            i, bone = _parse_bone_block(lines, i + 1, length_scale, angle_degrees)
            if bone.name in bones or bone.name == ROOT_BONE:
                raise ParseError(f"duplicate bone name {bone.name!r}", lineno)
            bones[bone.name] = bone
        elif section == "hierarchy":
            if toks[0].lower() in ("begin", "end"):
                i += 1
                continue
            parent, kids = toks[0], toks[1:]
            if parent != ROOT_BONE and parent not in bones:
                raise ParseError(f"hierarchy references unknown bone {parent!r}", lineno)
            for k in kids:
                if k not in bones:
                    raise ParseError(f"hierarchy references unknown bone {k!r}", lineno)
            children.setdefault(parent, []).extend(kids)
            i += 1
        else:
            i += 1

    root = Bone(
        name=ROOT_BONE,
        parent=None,
        direction=np.array([0.0, 0.0, 1.0]),
        length=0.0,
        axis_order=root_axis_order,
        dof=list(root_order),
    )

    # Hierarchy lines may appear in any order; rebuild parent links and
    # topologically sort starting at the root (detects cycles/orphans).
    parent_of: dict[str, str] = {}
    for parent, kids in children.items():
        for k in kids:
            if k in parent_of:
                raise ParseError(f"bone {k!r} has two parents")
            parent_of[k] = parent
    ordered: list[Bone] = [root]
    seen = {ROOT_BONE}
    queue = list(children.get(ROOT_BONE, []))
    while queue:
        name = queue.pop(0)
        if name in seen:
            raise ParseError(f"cycle in hierarchy at bone {name!r}")
        seen.add(name)
        b = bones[name]
        ordered.append(
            Bone(b.name, parent_of[name], b.direction, b.length, b.axis_order, b.dof)
        )
        queue.extend(children.get(name, []))
    unattached = set(bones) - seen
    if unattached:
        raise ParseError(f"bones not reachable from the root: {sorted(unattached)}")

    return SkeletonDef(
        bones=ordered,
        root_order=root_order,
        length_scale=length_scale,
        angle_degrees=angle_degrees,
    )


def _parse_bone_block(lines, i, length_scale, angle_degrees):
    name = None
    direction = np.array([0.0, 0.0, 1.0])
    length = 0.0
    axis_order = "XYZ"
    dof: list[str] = []
    while i < len(lines):
        lineno, toks = lines[i]
        key = toks[0].lower()
        if key == "end":
            if name is None:
                raise ParseError("bone block without a name", lineno)
            return i + 1, Bone(name, None, direction, length, axis_order, dof)
        if key == "name":
            name = toks[1]
        elif key == "direction":
            v = np.array([float(t) for t in toks[1:4]])
            n = np.linalg.norm(v)
            direction = v / n if n > 1e-9 else np.array([0.0, 0.0, 1.0])
        elif key == "length":
            length = float(toks[1]) * length_scale
        elif key == "axis":
            axis_order = toks[-1].upper()
        elif key == "dof":
            dof = [t.lower() for t in toks[1:]]
            bad = [c for c in dof if c not in _ROT_CHANNELS]
            if bad:
                raise ParseError(f"unknown dof channel {bad[0]!r}", lineno)
        elif key in ("id", "limits") or toks[0].startswith("("):
            pass  # ids unused; joint limits live in the robot model
        else:
            raise ParseError(f"unknown bonedata field {toks[0]!r}", lineno)
        i += 1
    raise ParseError("unterminated bone block")


# --------------------------------------------------------------------------
# motion files
# --------------------------------------------------------------------------


def parse_motion(
    text: str | bytes,
    skeleton: SkeletonDef,
    frame_rate: float = 120.0,
    meta: ClipMeta | None = None,
) -> RawMotionClip:
    """Parse a motion file against ``skeleton`` into a RawMotionClip.

    Per-frame Euler channels are composed into unit quaternions using each
    bone's axis order; root translation is scaled to meters.
    """
    if frame_rate <= 0:
        raise ValueError("frame rate must be positive")
    lines = _tokenize(text)
    degrees = skeleton.angle_degrees

    frames: list[dict[str, list[float]]] = []
    current: dict[str, list[float]] | None = None
    last_index: int | None = None
    for lineno, toks in lines:
        if toks[0].startswith(":"):
            flag = toks[0][1:].lower()
            if flag == "degrees":
                degrees = True
            elif flag == "radians":
                degrees = False
            continue
        if len(toks) == 1 and _is_int(toks[0]):
            idx = int(toks[0])
            if last_index is not None and idx <= last_index:
                raise ParseError(f"non-monotonic frame index {idx}", lineno)
            last_index = idx
            current = {}
            frames.append(current)
            continue
        if current is None:
            raise ParseError(f"bone data before any frame index: {toks[0]!r}", lineno)
        name = toks[0]
        if not skeleton.has_bone(name):
            raise ParseError(f"unknown bone {name!r}", lineno)
        try:
            values = [float(t) for t in toks[1:]]
        except ValueError:
            raise ParseError(f"bad value in channels of bone {name!r}", lineno) from None
        expected = skeleton.bone(name).dof
        if len(values) != len(expected):
            raise ParseError(
                f"bone {name!r} in frame {len(frames)} has {len(values)} channels, "
                f"expected {len(expected)}",
                lineno,
            )
        current[name] = values

    if len(frames) < 2:
        raise ParseError(f"motion has {len(frames)} frames; at least 2 required")

    n = len(frames)
    angle_scale = math.pi / 180.0 if degrees else 1.0
    root_translation = np.zeros((n, 3))
    rotations = {b.name: np.tile(identity_quat(), (n, 1)) for b in skeleton.bones if b.dof}

    for fi, frame in enumerate(frames):
        for b in skeleton.bones:
            if not b.dof:
                continue
            values = frame.get(b.name)
            if values is None:
                raise ParseError(f"bone {b.name!r} missing from frame {fi}")
            angles: dict[str, float] = {}
            for ch, val in zip(b.dof, values):
                if ch in _TRANS_CHANNELS:
                    root_translation[fi, _TRANS_CHANNELS.index(ch)] = val * skeleton.length_scale
                else:
                    angles[ch[1]] = val * angle_scale
            rotations[b.name][fi] = euler_to_quat(angles, b.axis_order)

    for name in rotations:
        rotations[name] = np.array([quat_normalize(q) for q in rotations[name]])

    meta = meta or ClipMeta(id="motion")
    meta.duration = (n - 1) / frame_rate
    return RawMotionClip(
        skeleton=skeleton,
        frame_rate=frame_rate,
        root_translation=root_translation,
        rotations=rotations,
        meta=meta,
    )


def _is_int(tok: str) -> bool:
    try:
        int(tok)
        return True
    except ValueError:
        return False


def skeleton_fk(
    skeleton: SkeletonDef,
    rotations: dict[str, np.ndarray],
    root_translation: np.ndarray,
    frame: int,
) -> dict[str, np.ndarray]:
    """World tip position of every bone at one frame (diagnostic/test helper)."""
    tips: dict[str, np.ndarray] = {}
    quats: dict[str, np.ndarray] = {}
    for b in skeleton.bones:
        local = rotations.get(b.name)
        q_local = local[frame] if local is not None else identity_quat()
        if b.parent is None:
            base_pos = np.asarray(root_translation[frame], dtype=float)
            q_world = q_local
        else:
            base_pos = tips[b.parent]
            q_world = quat_mul(quats[b.parent], q_local)
        tips[b.name] = base_pos + quat_rotate(q_world, b.direction) * b.length
        quats[b.name] = q_world
    return tips
