"""Adversarial style reward: least-squares discriminator over transitions.

Transition features pair consecutive frames of (upper-body joint positions,
upper-body joint velocities, root roll/pitch, root angular velocity) —
deliberately excluding root linear velocity so the discriminator sees
nothing the deployable policy could not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from ..retarget import RetargetedClip
from ..rewards import EnvStateSnapshot
from ..rotations import quat_to_rpy
from .nets import Discriminator

# per frame: 9 joint positions + 9 joint velocities + roll/pitch + angular velocity
FRAME_FEATURE_DIM = 9 + 9 + 2 + 3
TRANSITION_DIM = 2 * FRAME_FEATURE_DIM


@dataclass
class AMPConfig:
    hidden_sizes: tuple[int, ...] = (1024, 512)
    replay_buffer_size: int = 1_000_000
    demo_buffer_size: int = 200_000
    demo_fetch_batch: int = 512
    learning_batch: int = 4096
    learning_rate: float = 1e-4
    reward_coef: float = 4.0
    gradient_penalty_coef: float = 1.0

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d

    @staticmethod
    def from_dict(doc: dict) -> "AMPConfig":
        doc = dict(doc)
        if "hidden_sizes" in doc:
            doc["hidden_sizes"] = tuple(doc["hidden_sizes"])
        return AMPConfig(**doc)


def _frame_features(s: EnvStateSnapshot) -> np.ndarray:
    return np.concatenate(
        [
            s.q[s.upper_body_indices],
            s.dq[s.upper_body_indices],
            [s.roll, s.pitch],
            s.root_ang_vel,
        ]
    )


def transition_features(s_prev: EnvStateSnapshot, s: EnvStateSnapshot) -> np.ndarray:
    """Feature vector for one policy transition (two consecutive snapshots)."""
    return np.concatenate([_frame_features(s_prev), _frame_features(s)])


def clip_transition_features(clip: RetargetedClip) -> np.ndarray:
    """All consecutive-frame transition features of a retargeted clip, (N-1, D)."""
    upper = clip.upper_body_indices
    n = clip.num_frames
    rpy = np.stack([quat_to_rpy(q) for q in clip.root_orientation])
    frames = np.concatenate(
        [clip.q[:, upper], clip.dq[:, upper], rpy[:, :2], clip.root_angular_velocity],
        axis=1,
    )
    return np.concatenate([frames[: n - 1], frames[1:]], axis=1)


class TransitionBuffer:
    """Fixed-capacity ring buffer of transition features."""

    def __init__(self, capacity: int, dim: int = TRANSITION_DIM):
        self.data = np.zeros((capacity, dim))
        self.capacity = capacity
        self.size = 0
        self._ptr = 0

    def add(self, features: np.ndarray) -> None:
        features = np.atleast_2d(features)
        for row in features:
            self.data[self._ptr] = row
            self._ptr = (self._ptr + 1) % self.capacity
            self.size = min(self.size + 1, self.capacity)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.size == 0:
            raise ValueError("cannot sample from an empty transition buffer")
        idx = rng.integers(0, self.size, size=min(n, self.size))
        return self.data[idx]


def amp_reward(disc: Discriminator, features: np.ndarray, coef: float = 4.0) -> np.ndarray:
    """Style reward coef * max(0, 1 - 0.25 (d - 1)^2) per transition."""
    x = torch.as_tensor(np.atleast_2d(features), dtype=torch.float32)
    with torch.no_grad():
        d = disc(x).numpy()
    return coef * np.maximum(0.0, 1.0 - 0.25 * (d - 1.0) ** 2)


def train_discriminator(
    disc: Discriminator,
    optimizer: torch.optim.Optimizer,
    demo_batch: np.ndarray,
    policy_batch: np.ndarray,
    config: AMPConfig,
) -> dict[str, float]:
    """One least-squares update: demos toward +1, policy toward -1, plus a
    gradient penalty on demo samples."""
    if len(demo_batch) == 0 or len(policy_batch) == 0:
        raise ValueError("empty discriminator batch")
    demo = torch.as_tensor(demo_batch, dtype=torch.float32)
    policy = torch.as_tensor(policy_batch, dtype=torch.float32)

    d_demo = disc(demo)
    d_policy = disc(policy)
    loss_demo = ((d_demo - 1.0) ** 2).mean()
    loss_policy = ((d_policy + 1.0) ** 2).mean()

    demo_gp = demo.clone().requires_grad_(True)
    d_gp = disc(demo_gp)
    grad = torch.autograd.grad(d_gp.sum(), demo_gp, create_graph=True)[0]
    penalty = (grad ** 2).sum(dim=1).mean()

    loss = 0.5 * (loss_demo + loss_policy) + config.gradient_penalty_coef * penalty
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()

    with torch.no_grad():
        accuracy = 0.5 * ((d_demo > 0).float().mean() + (d_policy < 0).float().mean())
    return {
        "loss": loss.item(),
        "demo_loss": loss_demo.item(),
        "policy_loss": loss_policy.item(),
        "gradient_penalty": penalty.item(),
        "accuracy": accuracy.item(),
        "d_demo_mean": d_demo.mean().item(),
        "d_policy_mean": d_policy.mean().item(),
    }


def discriminator_accuracy(disc: Discriminator, demo: np.ndarray, policy: np.ndarray) -> float:
    """Fraction of samples classified by the sign of the output."""
    with torch.no_grad():
        d_demo = disc(torch.as_tensor(demo, dtype=torch.float32))
        d_policy = disc(torch.as_tensor(policy, dtype=torch.float32))
    correct = (d_demo > 0).sum().item() + (d_policy <= 0).sum().item()
    return correct / (len(demo) + len(policy))
