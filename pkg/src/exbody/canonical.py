"""Self-describing JSON clip format with explicit units and a version field.

Both raw (human) and retargeted (robot) clips round-trip losslessly:
floats are serialized with full shortest-round-trip precision. Saving
refuses non-finite values; loading validates the schema and reports the
offending field path.
"""

from __future__ import annotations

import json

import numpy as np

from .curation import CurationDecision, MotionLibrary
from .mocap import Bone, Category, ClipMeta, RawMotionClip, SkeletonDef
from .retarget import RetargetedClip, RetargetReport

FORMAT_NAME = "exbody-clip"
FORMAT_VERSION = 1

_UNITS = {"length": "meters", "angle": "radians", "frame_rate": "hz"}


class CanonicalError(ValueError):
    """Schema violation; carries the path of the offending field."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


def save_canonical(clip: RawMotionClip | RetargetedClip) -> bytes:
    if isinstance(clip, RawMotionClip):
        doc = _raw_to_doc(clip)
    elif isinstance(clip, RetargetedClip):
        doc = _retargeted_to_doc(clip)
    else:
        raise TypeError(f"cannot serialize {type(clip).__name__}")
    try:
        return json.dumps(doc, allow_nan=False, separators=(",", ":")).encode()
    except ValueError as e:
        raise CanonicalError(f"non-finite value in clip: {e}") from e


def load_canonical(data: bytes | str):
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise CanonicalError(f"not valid JSON: {e.msg}") from e
    if not isinstance(doc, dict):
        raise CanonicalError("document root must be an object")
    if doc.get("format") != FORMAT_NAME:
        raise CanonicalError(f"unknown format {doc.get('format')!r}", "$.format")
    if doc.get("version") != FORMAT_VERSION:
        raise CanonicalError(
            f"version mismatch: file has {doc.get('version')!r}, reader supports {FORMAT_VERSION}",
            "$.version",
        )
    kind = doc.get("kind")
    if kind == "raw":
        return _raw_from_doc(doc)
    if kind == "retargeted":
        return _retargeted_from_doc(doc)
    raise CanonicalError(f"unknown clip kind {kind!r}", "$.kind")


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _check_finite(name: str, arr: np.ndarray) -> list:
    if not np.all(np.isfinite(arr)):
        raise CanonicalError("array contains NaN or infinity", f"$.{name}")
    return arr.tolist()


def _meta_to_doc(meta: ClipMeta) -> dict:
    return {
        "id": meta.id,
        "description": meta.description,
        "category": meta.category.value,
        "duration": meta.duration,
    }


def _meta_from_doc(doc: dict, path: str) -> ClipMeta:
    try:
        return ClipMeta(
            id=doc["id"],
            description=doc.get("description", ""),
            category=Category(doc.get("category", "others")),
            duration=float(doc.get("duration", 0.0)),
        )
    except (KeyError, ValueError) as e:
        raise CanonicalError(f"bad clip meta: {e}", path) from e


def _field(doc: dict, key: str, path: str = "$"):
    if key not in doc:
        raise CanonicalError("missing required field", f"{path}.{key}")
    return doc[key]


def _array(doc: dict, key: str, shape_tail: tuple, path: str = "$") -> np.ndarray:
    arr = np.asarray(_field(doc, key, path), dtype=float)
    if arr.ndim != 1 + len(shape_tail) or arr.shape[1:] != shape_tail:
        raise CanonicalError(
            f"expected shape (N, {', '.join(map(str, shape_tail))}), got {arr.shape}",
            f"{path}.{key}",
        )
    return arr


def _raw_to_doc(clip: RawMotionClip) -> dict:
    sk = clip.skeleton
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": "raw",
        "units": _UNITS,
        "meta": _meta_to_doc(clip.meta),
        "frame_rate": clip.frame_rate,
        "skeleton": {
            "root_order": sk.root_order,
            "length_scale": sk.length_scale,
            "angle_degrees": sk.angle_degrees,
            "bones": [
                {
                    "name": b.name,
                    "parent": b.parent,
                    "direction": _check_finite(f"skeleton.bones[{i}].direction", b.direction),
                    "length": b.length,
                    "axis_order": b.axis_order,
                    "dof": b.dof,
                }
                for i, b in enumerate(sk.bones)
            ],
        },
        "root_translation": _check_finite("root_translation", clip.root_translation),
        "rotations": {
            name: _check_finite(f"rotations.{name}", quats)
            for name, quats in clip.rotations.items()
        },
    }


def _raw_from_doc(doc: dict) -> RawMotionClip:
    sk_doc = _field(doc, "skeleton")
    bones = []
    for i, b in enumerate(_field(sk_doc, "bones", "$.skeleton")):
        path = f"$.skeleton.bones[{i}]"
        bones.append(
            Bone(
                name=_field(b, "name", path),
                parent=b.get("parent"),
                direction=np.asarray(_field(b, "direction", path), dtype=float),
                length=float(_field(b, "length", path)),
                axis_order=_field(b, "axis_order", path),
                dof=list(_field(b, "dof", path)),
            )
        )
    skeleton = SkeletonDef(
        bones=bones,
        root_order=list(_field(sk_doc, "root_order", "$.skeleton")),
        length_scale=float(sk_doc.get("length_scale", 1.0)),
        angle_degrees=bool(sk_doc.get("angle_degrees", True)),
    )
    rotations = {
        name: _array({"r": quats}, "r", (4,), f"$.rotations.{name}")
        for name, quats in _field(doc, "rotations").items()
    }
    try:
        return RawMotionClip(
            skeleton=skeleton,
            frame_rate=float(_field(doc, "frame_rate")),
            root_translation=_array(doc, "root_translation", (3,)),
            rotations=rotations,
            meta=_meta_from_doc(_field(doc, "meta"), "$.meta"),
        )
    except ValueError as e:
        raise CanonicalError(str(e)) from e


def _retargeted_to_doc(clip: RetargetedClip) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": "retargeted",
        "units": _UNITS,
        "meta": _meta_to_doc(clip.meta),
        "frame_rate": clip.frame_rate,
        "joint_names": clip.joint_names,
        "upper_body_indices": clip.upper_body_indices.tolist(),
        "lower_body_indices": clip.lower_body_indices.tolist(),
        "q": _check_finite("q", clip.q),
        "dq": _check_finite("dq", clip.dq),
        "root_position": _check_finite("root_position", clip.root_position),
        "root_orientation": _check_finite("root_orientation", clip.root_orientation),
        "root_linear_velocity": _check_finite("root_linear_velocity", clip.root_linear_velocity),
        "root_angular_velocity": _check_finite("root_angular_velocity", clip.root_angular_velocity),
        "keypoints": _check_finite("keypoints", clip.keypoints),
        "lower_keypoints": _check_finite("lower_keypoints", clip.lower_keypoints),
        "limit_report": clip.limit_report.to_dict(),
    }


def _retargeted_from_doc(doc: dict) -> RetargetedClip:
    report_doc = doc.get("limit_report", {})
    report = RetargetReport(
        joint_limit_excess=dict(report_doc.get("joint_limit_excess", {})),
        hinge_residual=dict(report_doc.get("hinge_residual", {})),
    )
    try:
        return RetargetedClip(
            frame_rate=float(_field(doc, "frame_rate")),
            q=_array(doc, "q", (19,)),
            dq=_array(doc, "dq", (19,)),
            root_position=_array(doc, "root_position", (3,)),
            root_orientation=_array(doc, "root_orientation", (4,)),
            root_linear_velocity=_array(doc, "root_linear_velocity", (3,)),
            root_angular_velocity=_array(doc, "root_angular_velocity", (3,)),
            keypoints=_array(doc, "keypoints", (18,)),
            lower_keypoints=_array(doc, "lower_keypoints", (12,)),
            meta=_meta_from_doc(_field(doc, "meta"), "$.meta"),
            limit_report=report,
            joint_names=list(_field(doc, "joint_names")),
            upper_body_indices=np.asarray(_field(doc, "upper_body_indices"), dtype=int),
            lower_body_indices=np.asarray(_field(doc, "lower_body_indices"), dtype=int),
        )
    except ValueError as e:
        if isinstance(e, CanonicalError):
            raise
        raise CanonicalError(str(e)) from e


def save_curation_report(library: MotionLibrary) -> bytes:
    doc = {
        "format": "exbody-curation-report",
        "version": FORMAT_VERSION,
        "decisions": [d.to_dict() for d in library.report.values()],
    }
    return json.dumps(doc, indent=2).encode()


def load_curation_report(data: bytes | str) -> dict[str, CurationDecision]:
    doc = json.loads(data)
    return {
        d["clip_id"]: CurationDecision(
            d["clip_id"], d["included"], d["matched_include"], d["matched_exclude"]
        )
        for d in doc["decisions"]
    }
