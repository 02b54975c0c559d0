"""Training orchestration: variants, rollout collection, logging, checkpoints.

Variants wire the reward mode, reference-state initialization flag and goal
sampler:

- ``exbody``: upper-body expression + root-movement tracking (default)
- ``exbody+amp``: adds the adversarial style reward
- ``exbody+amp-noreg``: style reward replaces the regularization terms
- ``no-rsi``: resets to the default pose instead of dataset states
- ``random-sample``: movement goals sampled uniformly instead of from clips
- ``full-body-tracking``: expression goal extends to all joints/keypoints
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..curation import MotionLibrary
from ..env import EnvConfig, HumanoidEnv, VectorEnv, observation_dim
from ..goals import retargeted_clips
from ..rewards import RewardWeights
from ..robot import NUM_JOINTS, RobotModel, default_robot_model
from .amp import (
    AMPConfig,
    TRANSITION_DIM,
    TransitionBuffer,
    amp_reward,
    clip_transition_features,
    train_discriminator,
    transition_features,
)
from .buffer import RolloutBuffer
from .gae import compute_gae
from .nets import ActorCritic, Discriminator
from .normalize import RewardNormalizer
from .ppo import PPOConfig, ppo_update

CHECKPOINT_FORMAT = "exbody-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class Variant:
    name: str
    reward_mode: str = "exbody"
    rsi: bool = True
    goal_source: str = "dataset"
    use_amp: bool = False
    regularization: bool = True


VARIANTS = {
    "exbody": Variant("exbody"),
    "exbody+amp": Variant("exbody+amp", use_amp=True),
    "exbody+amp-noreg": Variant("exbody+amp-noreg", use_amp=True, regularization=False),
    "no-rsi": Variant("no-rsi", rsi=False),
    "random-sample": Variant("random-sample", goal_source="random-command"),
    "full-body-tracking": Variant("full-body-tracking", reward_mode="full-body-tracking"),
}


@dataclass
class TrainConfig:
    ppo: PPOConfig = field(default_factory=PPOConfig)
    amp: AMPConfig = field(default_factory=AMPConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    weights: RewardWeights = field(default_factory=RewardWeights)
    iterations: int = 200
    discriminator_updates_per_iteration: int = 2

    def to_dict(self) -> dict:
        return {
            "ppo": self.ppo.to_dict(),
            "amp": self.amp.to_dict(),
            "env": _env_to_dict(self.env),
            "weights": self.weights.to_dict(),
            "iterations": self.iterations,
            "discriminator_updates_per_iteration": self.discriminator_updates_per_iteration,
        }


def _env_to_dict(cfg: EnvConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["command_ranges"] = dataclasses.asdict(cfg.command_ranges)
    return d


def _env_from_dict(doc: dict) -> EnvConfig:
    from ..goals import CommandRanges

    doc = dict(doc)
    ranges = doc.pop("command_ranges", None)
    cfg = EnvConfig(**doc)
    if ranges is not None:
        cfg.command_ranges = CommandRanges(**{k: tuple(v) for k, v in ranges.items()})
    return cfg


@dataclass
class TrainResult:
    variant: str
    seed: int
    curves: list[dict]
    checkpoint_path: Path | None
    policy: ActorCritic
    final_metrics: dict


def apply_variant(base: EnvConfig, variant: Variant) -> EnvConfig:
    cfg = dataclasses.replace(
        base,
        reward_mode=variant.reward_mode,
        rsi=variant.rsi,
        goal_source=variant.goal_source,
        include_regularization=variant.regularization,
    )
    return cfg


class _EpisodeTracker:
    """Accumulates per-env episode statistics from step infos."""

    def __init__(self, num_envs: int, control_dt: float):
        self.control_dt = control_dt
        self.steps = np.zeros(num_envs, dtype=int)
        self.sums = {k: np.zeros(num_envs) for k in ("melv", "merp", "mek", "ret")}

    def update(self, infos, dones) -> list[dict]:
        finished = []
        for i, info in enumerate(infos):
            b = info["breakdown"]
            self.steps[i] += 1
            self.sums["melv"][i] += b.weighted("linear_velocity")
            self.sums["merp"][i] += b.weighted("roll_pitch")
            self.sums["mek"][i] += b.weighted("keypoint_position")
            self.sums["ret"][i] += b.total
            if dones[i]:
                finished.append(
                    {
                        "length_s": self.steps[i] * self.control_dt,
                        "length_steps": int(self.steps[i]),
                        "melv": self.sums["melv"][i],
                        "merp": self.sums["merp"][i],
                        "mek": self.sums["mek"][i],
                        "return": self.sums["ret"][i],
                        "done_reason": info["done_reason"],
                    }
                )
                self.steps[i] = 0
                for v in self.sums.values():
                    v[i] = 0.0
        return finished


def train(
    variant_name: str,
    library: MotionLibrary,
    config: TrainConfig | None = None,
    seed: int = 0,
    out_dir: str | Path | None = None,
    model: RobotModel | None = None,
    log_every: int = 0,
) -> TrainResult:
    """Train one variant; deterministic given the seed."""
    if variant_name not in VARIANTS:
        raise ValueError(f"unknown variant {variant_name!r}; choose from {sorted(VARIANTS)}")
    variant = VARIANTS[variant_name]
    config = config or TrainConfig()
    model = model or default_robot_model()

    torch.manual_seed(seed)
    env_cfg = apply_variant(config.env, variant)
    envs = [
        HumanoidEnv(model, library, env_cfg, config.weights)
        for _ in range(config.ppo.num_envs)
    ]
    vec = VectorEnv(envs, seed)
    obs_dim = envs[0].observation_dim

    policy = ActorCritic(obs_dim, NUM_JOINTS, config.ppo.hidden_sizes, config.ppo.init_log_std)
    optimizer = torch.optim.Adam(policy.parameters(), lr=config.ppo.learning_rate)
    normalizer = RewardNormalizer(
        config.ppo.discount, config.ppo.num_envs, enabled=config.ppo.reward_normalization
    )
    buffer = RolloutBuffer(config.ppo.num_envs, config.ppo.timesteps_per_rollout, obs_dim, NUM_JOINTS)
    tracker = _EpisodeTracker(config.ppo.num_envs, env_cfg.control_dt)
    amp_rng = np.random.default_rng(seed + 101)

    disc = None
    demo_buffer = replay_buffer = None
    prev_snapshots = [None] * config.ppo.num_envs
    if variant.use_amp:
        disc = Discriminator(TRANSITION_DIM, config.amp.hidden_sizes)
        disc_opt = torch.optim.Adam(disc.parameters(), lr=config.amp.learning_rate)
        demo_buffer = TransitionBuffer(config.amp.demo_buffer_size)
        for clip in retargeted_clips(library):
            demo_buffer.add(clip_transition_features(clip))
        replay_buffer = TransitionBuffer(config.amp.replay_buffer_size)

    obs = vec.reset_all()
    curves: list[dict] = []
    for iteration in range(config.iterations):
        buffer.clear()
        iteration_episodes: list[dict] = []
        for _ in range(config.ppo.timesteps_per_rollout):
            obs_t = torch.as_tensor(obs, dtype=torch.float32)
            with torch.no_grad():
                actions_t, log_probs_t, values_t = policy.act(obs_t)
            actions = actions_t.numpy().astype(float)
            next_obs, rewards, dones, infos = vec.step(actions)

            if variant.use_amp:
                feats = np.stack(
                    [
                        transition_features(
                            prev_snapshots[i] or infos[i]["snapshot"], infos[i]["snapshot"]
                        )
                        for i in range(len(infos))
                    ]
                )
                replay_buffer.add(feats)
                style = amp_reward(disc, feats, config.amp.reward_coef)
                rewards = rewards + style
                for i, info in enumerate(infos):
                    prev_snapshots[i] = None if dones[i] else info["snapshot"]

            learn_rewards = normalizer.normalize(rewards, dones)
            buffer.add(obs, actions, log_probs_t.numpy(), values_t.numpy(), learn_rewards, dones)
            iteration_episodes.extend(tracker.update(infos, dones))
            obs = next_obs

        with torch.no_grad():
            bootstrap = policy.value(torch.as_tensor(obs, dtype=torch.float32)).numpy()
        advantages, returns = compute_gae(
            buffer.rewards, buffer.values, buffer.dones, bootstrap,
            config.ppo.discount, config.ppo.gae_lambda,
        )
        batch = {
            "obs": torch.as_tensor(buffer.obs.reshape(-1, obs_dim), dtype=torch.float32),
            "actions": torch.as_tensor(buffer.actions.reshape(-1, NUM_JOINTS), dtype=torch.float32),
            "log_probs": torch.as_tensor(buffer.log_probs.reshape(-1), dtype=torch.float32),
            "advantages": torch.as_tensor(advantages.reshape(-1), dtype=torch.float32),
            "returns": torch.as_tensor(returns.reshape(-1), dtype=torch.float32),
        }
        stats = ppo_update(policy, optimizer, batch, config.ppo)

        if variant.use_amp:
            for _ in range(config.discriminator_updates_per_iteration):
                demo = demo_buffer.sample(config.amp.demo_fetch_batch, amp_rng)
                pol = replay_buffer.sample(config.amp.learning_batch, amp_rng)
                disc_stats = train_discriminator(disc, disc_opt, demo, pol, config.amp)
            stats.update({f"disc_{k}": v for k, v in disc_stats.items()})

        curve = {
            "iteration": iteration,
            "episodes": len(iteration_episodes),
            "mean_episode_return": _mean(iteration_episodes, "return"),
            "mel": _mean(iteration_episodes, "length_s"),
            "melv": _mean(iteration_episodes, "melv"),
            "merp": _mean(iteration_episodes, "merp"),
            "mek": _mean(iteration_episodes, "mek"),
            **stats,
        }
        curves.append(curve)
        if log_every and iteration % log_every == 0:
            print(
                f"[{variant_name} seed={seed}] it {iteration:4d} "
                f"ret={curve['mean_episode_return']} mel={curve['mel']}"
            )

    final_metrics = _summarize(curves)
    checkpoint_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        checkpoint_path = out_dir / f"{variant_name.replace('+', '_')}_seed{seed}.pt"
        save_checkpoint(checkpoint_path, policy, variant_name, seed, config, obs_dim)
        with open(out_dir / f"curves_{variant_name.replace('+', '_')}_seed{seed}.jsonl", "w") as f:
            for c in curves:
                f.write(json.dumps(c) + "\n")
    return TrainResult(variant_name, seed, curves, checkpoint_path, policy, final_metrics)


def _mean(episodes: list[dict], key: str) -> float | None:
    if not episodes:
        return None
    return float(np.mean([e[key] for e in episodes]))


def _summarize(curves: list[dict]) -> dict:
    tail = [c for c in curves[-10:] if c["mel"] is not None]
    if not tail:
        return {"mel": None, "melv": None, "merp": None, "mek": None}
    return {k: float(np.mean([c[k] for c in tail])) for k in ("mel", "melv", "merp", "mek")}


def save_checkpoint(
    path: str | Path,
    policy: ActorCritic,
    variant: str,
    seed: int,
    config: TrainConfig,
    obs_dim: int,
) -> None:
    torch.save(
        {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "variant": variant,
            "seed": seed,
            "obs_dim": obs_dim,
            "act_dim": NUM_JOINTS,
            "config": config.to_dict(),
            "state_dict": policy.state_dict(),
        },
        path,
    )


def load_checkpoint(path: str | Path) -> tuple[ActorCritic, dict]:
    doc = torch.load(path, weights_only=False)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a checkpoint file")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"checkpoint version {doc.get('version')} unsupported")
    ppo = PPOConfig.from_dict(doc["config"]["ppo"])
    policy = ActorCritic(doc["obs_dim"], doc["act_dim"], ppo.hidden_sizes, ppo.init_log_std)
    policy.load_state_dict(doc["state_dict"])
    policy.eval()
    return policy, doc


def rebuild_env_config(doc: dict) -> EnvConfig:
    return _env_from_dict(doc["config"]["env"])
