"""MDP adaptation environment over the simulated cluster and Raft gate."""

from .environment import (
    AdaptationEnv,
    EnvConfig,
    EpisodeDoneError,
    N_ACTIONS,
    RaftConfig,
    StepResult,
)
from .observation import build_observation, observation_size
from .rewards import RewardConfig, compute_reward, sparse_reward

__all__ = [
    "AdaptationEnv", "EnvConfig", "EpisodeDoneError", "N_ACTIONS",
    "RaftConfig", "StepResult",
    "build_observation", "observation_size",
    "RewardConfig", "compute_reward", "sparse_reward",
]
