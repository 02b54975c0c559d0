"""Online reward normalization by the running std of discounted returns."""

from __future__ import annotations

import numpy as np


class RunningVariance:
    """Welford accumulator over batches of scalars."""

    def __init__(self):
        self.count = 0.0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, batch: np.ndarray) -> None:
        batch = np.asarray(batch, dtype=float).ravel()
        if batch.size == 0:
            return
        b_count = batch.size
        b_mean = batch.mean()
        b_m2 = ((batch - b_mean) ** 2).sum()
        delta = b_mean - self.mean
        total = self.count + b_count
        self.mean += delta * b_count / total
        self.m2 += b_m2 + delta * delta * self.count * b_count / total
        self.count = total

    @property
    def variance(self) -> float:
        return self.m2 / self.count if self.count > 1 else 0.0


class RewardNormalizer:
    """Divides rewards by the running std of discounted return estimates.

    Stateful across rollouts: per-environment discounted returns persist
    and the variance tracker is only ever extended. A variance floor keeps
    constant-zero reward streams at exactly zero output.
    """

    def __init__(self, gamma: float, num_envs: int, enabled: bool = True, epsilon: float = 1e-8):
        self.gamma = gamma
        self.enabled = enabled
        self.epsilon = epsilon
        self.returns = np.zeros(num_envs)
        self.stat = RunningVariance()

    def normalize(self, rewards: np.ndarray, dones: np.ndarray) -> np.ndarray:
        rewards = np.asarray(rewards, dtype=float)
        if not self.enabled:
            return rewards
        self.returns = self.returns * self.gamma + rewards
        self.stat.update(self.returns)
        out = rewards / np.sqrt(self.stat.variance + self.epsilon)
        self.returns[np.asarray(dones, dtype=bool)] = 0.0
        return out
