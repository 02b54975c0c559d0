"""Fixed-size on-policy rollout storage."""

from __future__ import annotations

import numpy as np


class RolloutBuffer:
    """Per-env per-step storage; must be full before an update and is
    cleared afterwards."""

    def __init__(self, num_envs: int, num_steps: int, obs_dim: int, act_dim: int):
        self.num_envs = num_envs
        self.num_steps = num_steps
        self.obs = np.zeros((num_steps, num_envs, obs_dim))
        self.actions = np.zeros((num_steps, num_envs, act_dim))
        self.log_probs = np.zeros((num_steps, num_envs))
        self.values = np.zeros((num_steps, num_envs))
        self.rewards = np.zeros((num_steps, num_envs))
        self.dones = np.zeros((num_steps, num_envs))
        self.step = 0

    @property
    def full(self) -> bool:
        return self.step == self.num_steps

    @property
    def capacity(self) -> int:
        return self.num_steps * self.num_envs

    def add(self, obs, actions, log_probs, values, rewards, dones) -> None:
        if self.full:
            raise RuntimeError("rollout buffer is full; update and clear first")
        t = self.step
        self.obs[t] = obs
        self.actions[t] = actions
        self.log_probs[t] = log_probs
        self.values[t] = values
        self.rewards[t] = rewards
        self.dones[t] = dones
        self.step += 1

    def clear(self) -> None:
        self.step = 0
