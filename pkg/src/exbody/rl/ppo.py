"""Clipped-surrogate policy optimization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from .nets import ActorCritic


@dataclass
class PPOConfig:
    discount: float = 0.99
    gae_lambda: float = 0.95
    timesteps_per_rollout: int = 21
    epochs_per_rollout: int = 5
    minibatches_per_epoch: int = 4
    entropy_coef: float = 0.01
    value_loss_coef: float = 1.0
    clip_range: float = 0.2
    reward_normalization: bool = True
    learning_rate: float = 1e-3
    num_envs: int = 64  # desk-scale default; reference setting is 4096
    hidden_sizes: tuple[int, ...] = (512, 256, 128)
    init_log_std: float = -1.0
    advantage_norm: bool = True  # per minibatch

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d

    @staticmethod
    def from_dict(doc: dict) -> "PPOConfig":
        doc = dict(doc)
        if "hidden_sizes" in doc:
            doc["hidden_sizes"] = tuple(doc["hidden_sizes"])
        return PPOConfig(**doc)


def ppo_update(
    policy: ActorCritic,
    optimizer: torch.optim.Optimizer,
    batch: dict[str, torch.Tensor],
    config: PPOConfig,
) -> dict[str, float]:
    """Run epochs x minibatches of clipped-surrogate updates over a full batch.

    ``batch`` holds flattened tensors: obs, actions, log_probs, advantages,
    returns. Advantages are re-normalized per minibatch. Raises on NaN loss
    with diagnostics rather than propagating silently.
    """
    n = batch["obs"].shape[0]
    mb_size = n // config.minibatches_per_epoch
    if mb_size == 0:
        raise ValueError(f"batch of {n} too small for {config.minibatches_per_epoch} minibatches")

    totals = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "clip_fraction": 0.0, "approx_kl": 0.0}
    updates = 0
    for _ in range(config.epochs_per_rollout):
        perm = torch.randperm(n)
        for mb in range(config.minibatches_per_epoch):
            sl = perm[mb * mb_size : (mb + 1) * mb_size]
            obs, actions = batch["obs"][sl], batch["actions"][sl]
            old_log_probs = batch["log_probs"][sl]
            advantages = batch["advantages"][sl]
            returns = batch["returns"][sl]
            if config.advantage_norm:
                advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)

            log_probs, entropy, values = policy.evaluate(obs, actions)
            ratio = torch.exp(log_probs - old_log_probs)
            clipped = torch.clamp(ratio, 1.0 - config.clip_range, 1.0 + config.clip_range)
            policy_loss = -torch.min(ratio * advantages, clipped * advantages).mean()
            value_loss = ((values - returns) ** 2).mean()
            entropy_mean = entropy.mean()
            loss = (
                policy_loss
                + config.value_loss_coef * value_loss
                - config.entropy_coef * entropy_mean
            )
            if not torch.isfinite(loss):
                raise RuntimeError(
                    "non-finite PPO loss: "
                    f"policy={policy_loss.item()} value={value_loss.item()} "
                    f"entropy={entropy_mean.item()} ratio_max={ratio.max().item()}"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

            with torch.no_grad():
                totals["policy_loss"] += policy_loss.item()
                totals["value_loss"] += value_loss.item()
                totals["entropy"] += entropy_mean.item()
                totals["clip_fraction"] += (torch.abs(ratio - 1.0) > config.clip_range).float().mean().item()
                totals["approx_kl"] += (old_log_probs - log_probs).mean().item()
            updates += 1
    return {k: v / updates for k, v in totals.items()}
