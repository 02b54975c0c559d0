"""Distribution and hand-position reports over clips or policy rollouts.

Clips are sampled at 1-second increments; rollouts contribute every logged
step. Reports are emitted as a JSON table file plus SVG plots, and the
returned summary carries the headline statistics (means, counts).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .curation import MotionLibrary
from .goals import retargeted_clips
from .metrics import EpisodeRecord
from .rotations import quat_to_rpy
from . import svgplot

DEFAULT_HAND_SAMPLES = 10_000


def sample_clip_states(library: MotionLibrary, increment: float = 1.0) -> dict[str, np.ndarray]:
    """Root-movement states of all retargeted clips at fixed time increments."""
    clips = retargeted_clips(library)
    if not clips:
        raise ValueError("no retargeted clips to sample")
    out = {k: [] for k in ("vx", "vy", "roll", "pitch", "height", "yaw_rate")}
    for clip in clips:
        t = 0.0
        while t <= clip.duration + 1e-9:
            frame = min(int(round(t * clip.frame_rate)), clip.num_frames - 1)
            v = clip.root_linear_velocity[frame]
            rpy = quat_to_rpy(clip.root_orientation[frame])
            out["vx"].append(v[0])
            out["vy"].append(v[1])
            out["roll"].append(rpy[0])
            out["pitch"].append(rpy[1])
            out["height"].append(clip.root_position[frame, 2])
            out["yaw_rate"].append(clip.root_angular_velocity[frame, 2])
            t += increment
    return {k: np.array(v) for k, v in out.items()}


def rollout_states(records: list[EpisodeRecord]) -> dict[str, np.ndarray]:
    """Pool the per-step traces of rollout episode records."""
    traced = [r for r in records if r.lin_vel is not None]
    if not traced:
        raise ValueError("episode records carry no state traces")
    return {
        "vx": np.concatenate([r.lin_vel[:, 0] for r in traced]),
        "vy": np.concatenate([r.lin_vel[:, 1] for r in traced]),
        "roll": np.concatenate([r.rpy[:, 0] for r in traced]),
        "pitch": np.concatenate([r.rpy[:, 1] for r in traced]),
        "height": np.concatenate([r.height for r in traced]),
        "yaw_rate": np.concatenate([r.yaw_rate for r in traced]),
    }


def _hist1d(values: np.ndarray, bins: int = 30) -> dict:
    counts, edges = np.histogram(values, bins=bins)
    return {"counts": counts.tolist(), "edges": edges.tolist()}


def _hist2d(x: np.ndarray, y: np.ndarray, bins: int = 30) -> dict:
    counts, xe, ye = np.histogram2d(x, y, bins=bins)
    return {"counts": counts.tolist(), "xedges": xe.tolist(), "yedges": ye.tolist()}


def distribution_report(
    states: dict[str, np.ndarray],
    out_dir: str | Path | None = None,
    label: str = "dataset",
) -> dict:
    """Histograms of (vx, vy), (roll, pitch), height and yaw rate."""
    n = len(states["vx"])
    if n == 0:
        raise ValueError("no samples to report")
    tables = {
        "velocity_xy": _hist2d(states["vx"], states["vy"]),
        "roll_pitch": _hist2d(states["roll"], states["pitch"]),
        "height": _hist1d(states["height"]),
        "yaw_rate": _hist1d(states["yaw_rate"]),
    }
    summary = {
        "label": label,
        "samples": n,
        "means": {k: float(np.mean(v)) for k, v in states.items()},
        "stds": {k: float(np.std(v)) for k, v in states.items()},
        "tables": tables,
    }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"distribution_{label}.json", "w") as f:
            json.dump(summary, f, indent=2)
        t = tables["velocity_xy"]
        svgplot.write_histogram2d(
            out_dir / f"velocity_xy_{label}.svg", t["counts"], t["xedges"], t["yedges"],
            f"root velocity ({label})", "vx [m/s]", "vy [m/s]",
        )
        t = tables["roll_pitch"]
        svgplot.write_histogram2d(
            out_dir / f"roll_pitch_{label}.svg", t["counts"], t["xedges"], t["yedges"],
            f"root roll/pitch ({label})", "roll [rad]", "pitch [rad]",
        )
        t = tables["height"]
        svgplot.write_histogram1d(
            out_dir / f"height_{label}.svg", t["counts"], t["edges"],
            f"root height ({label})", "height [m]",
        )
        t = tables["yaw_rate"]
        svgplot.write_histogram1d(
            out_dir / f"yaw_rate_{label}.svg", t["counts"], t["edges"],
            f"yaw angular velocity ({label})", "yaw rate [rad/s]",
        )
    return summary


def hand_positions_from_clips(
    library: MotionLibrary, n: int = DEFAULT_HAND_SAMPLES, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Sample n root-relative hand positions from the clip library, (n, 3)."""
    rng = rng or np.random.default_rng(0)
    clips = retargeted_clips(library)
    if not clips:
        raise ValueError("no retargeted clips to sample")
    durations = np.array([c.duration for c in clips])
    probs = durations / durations.sum()
    out = np.empty((n, 3))
    for i in range(n):
        clip = clips[int(rng.choice(len(clips), p=probs))]
        frame = int(rng.integers(0, clip.num_frames))
        side = int(rng.integers(0, 2))
        hand = clip.keypoints[frame].reshape(6, 3)[4 + side]
        rel = hand - clip.root_position[frame]
        yaw = quat_to_rpy(clip.root_orientation[frame])[2]
        c, s = math.cos(-yaw), math.sin(-yaw)
        out[i] = (c * rel[0] - s * rel[1], s * rel[0] + c * rel[1], rel[2])
    return out


def hand_positions_from_records(
    records: list[EpisodeRecord], n: int = DEFAULT_HAND_SAMPLES, rng: np.random.Generator | None = None
) -> np.ndarray:
    rng = rng or np.random.default_rng(0)
    traced = [r for r in records if r.hand_points is not None]
    if not traced:
        raise ValueError("episode records carry no hand traces")
    pool = np.concatenate([r.hand_points.reshape(-1, 3) for r in traced])
    idx = rng.integers(0, len(pool), size=n)
    return pool[idx]


def hand_position_report(
    points: np.ndarray,
    out_dir: str | Path | None = None,
    label: str = "dataset",
) -> dict:
    """Point cloud file plus bounding statistics for hand positions."""
    stats = {
        "label": label,
        "samples": int(len(points)),
        "mean": points.mean(axis=0).tolist(),
        "min": points.min(axis=0).tolist(),
        "max": points.max(axis=0).tolist(),
        "std": points.std(axis=0).tolist(),
    }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"hand_positions_{label}.json", "w") as f:
            json.dump({"stats": stats, "points": points.tolist()}, f)
        svgplot.write_scatter(
            out_dir / f"hand_positions_{label}.svg",
            points[:, 0], points[:, 2],
            f"hand positions relative to root ({label})", "x [m]", "z [m]",
        )
    return stats


def compare_hand_reports(a: dict, b: dict) -> dict:
    """Per-axis absolute difference of distribution means."""
    return {
        "mean_abs_diff": [abs(x - y) for x, y in zip(a["mean"], b["mean"])],
        "labels": [a["label"], b["label"]],
    }
