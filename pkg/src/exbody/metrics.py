"""Episode records and evaluation metrics.

MEL is the mean episode duration in seconds. MELV / MERP / MEK are mean
per-episode cumulative weighted tracking rewards (linear velocity,
roll-pitch, keypoints). The per-step means are also reported since either
reading of "mean episode reward" is defensible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

import torch

from .env import HumanoidEnv


@dataclass
class EpisodeRecord:
    steps: int
    control_dt: float
    term_sums: dict[str, float]  # weighted reward sums per term name
    total_reward: float
    done_reason: str | None = None
    # optional per-step state traces for reports
    lin_vel: np.ndarray | None = None  # (T, 3)
    rpy: np.ndarray | None = None  # (T, 3)
    height: np.ndarray | None = None  # (T,)
    yaw_rate: np.ndarray | None = None  # (T,)
    hand_points: np.ndarray | None = None  # (T, 2, 3) root-relative

    @property
    def seconds(self) -> float:
        return self.steps * self.control_dt


@dataclass
class MetricsReport:
    variant: str
    batch_size: int
    mel: float  # seconds
    melv: float
    merp: float
    mek: float
    per_step: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "batch_size": self.batch_size,
            "mel_s": self.mel,
            "melv": self.melv,
            "merp": self.merp,
            "mek": self.mek,
            "per_step": self.per_step,
        }


def compute_metrics(records: list[EpisodeRecord], variant: str = "") -> MetricsReport:
    """Batch means over completed episodes; order-invariant."""
    if not records:
        raise ValueError("cannot compute metrics over an empty episode batch")
    mel = float(np.mean([r.seconds for r in records]))
    melv = float(np.mean([r.term_sums["linear_velocity"] for r in records]))
    merp = float(np.mean([r.term_sums["roll_pitch"] for r in records]))
    mek = float(np.mean([r.term_sums["keypoint_position"] for r in records]))
    steps = float(np.mean([r.steps for r in records]))
    per_step = {
        "melv": melv / steps,
        "merp": merp / steps,
        "mek": mek / steps,
        "steps": steps,
    }
    return MetricsReport(variant, len(records), mel, melv, merp, mek, per_step)


def run_episode(
    env: HumanoidEnv,
    policy,
    rng: np.random.Generator,
    deterministic: bool = True,
    keep_traces: bool = False,
) -> EpisodeRecord:
    """Roll one episode with a policy (or action callable)."""
    obs = env.reset(rng)
    term_sums: dict[str, float] = {}
    total = 0.0
    traces = {"lin_vel": [], "rpy": [], "height": [], "yaw_rate": [], "hands": []}
    done = False
    steps = 0
    reason = None
    while not done:
        action = _policy_action(policy, obs, deterministic)
        obs, breakdown, done, info = env.step(action)
        for name, (_, weighted) in breakdown.terms.items():
            term_sums[name] = term_sums.get(name, 0.0) + weighted
        total += breakdown.total
        steps += 1
        reason = info["done_reason"]
        if keep_traces:
            s = info["snapshot"]
            traces["lin_vel"].append(s.root_lin_vel.copy())
            traces["rpy"].append(np.array([s.roll, s.pitch, s.yaw]))
            traces["height"].append(s.root_height)
            traces["yaw_rate"].append(s.root_ang_vel[2])
            traces["hands"].append(_root_relative_hands(s))
    record = EpisodeRecord(
        steps=steps,
        control_dt=env.config.control_dt,
        term_sums=term_sums,
        total_reward=total,
        done_reason=reason,
    )
    if keep_traces:
        record.lin_vel = np.array(traces["lin_vel"])
        record.rpy = np.array(traces["rpy"])
        record.height = np.array(traces["height"])
        record.yaw_rate = np.array(traces["yaw_rate"])
        record.hand_points = np.array(traces["hands"])
    return record


def _root_relative_hands(s) -> np.ndarray:
    import math

    hands = s.keypoints.reshape(6, 3)[4:6]  # l_hand, r_hand per keypoint order
    rel = hands - s.root_position
    c, sn = math.cos(-s.yaw), math.sin(-s.yaw)
    out = np.empty_like(rel)
    out[:, 0] = c * rel[:, 0] - sn * rel[:, 1]
    out[:, 1] = sn * rel[:, 0] + c * rel[:, 1]
    out[:, 2] = rel[:, 2]
    return out


def run_episodes(
    env: HumanoidEnv,
    policy,
    n: int,
    seed: int = 0,
    deterministic: bool = True,
    keep_traces: bool = False,
) -> list[EpisodeRecord]:
    rng = np.random.default_rng(seed)
    return [
        run_episode(env, policy, rng, deterministic=deterministic, keep_traces=keep_traces)
        for _ in range(n)
    ]


def _policy_action(policy, obs: np.ndarray, deterministic: bool) -> np.ndarray:
    if callable(policy) and not hasattr(policy, "act_deterministic"):
        return np.asarray(policy(obs), dtype=float)
    obs_t = torch.as_tensor(obs, dtype=torch.float32).unsqueeze(0)
    if deterministic:
        return policy.act_deterministic(obs_t).squeeze(0).numpy().astype(float)
    action, _, _ = policy.act(obs_t)
    return action.squeeze(0).numpy().astype(float)
