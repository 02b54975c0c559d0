from .gae import compute_gae
from .ppo import PPOConfig, ppo_update
from .amp import AMPConfig, amp_reward, train_discriminator, transition_features

__all__ = [
    "compute_gae",
    "PPOConfig",
    "ppo_update",
    "AMPConfig",
    "amp_reward",
    "train_discriminator",
    "transition_features",
]
