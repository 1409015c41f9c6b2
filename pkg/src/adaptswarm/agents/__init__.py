"""The five adaptation planners and their training machinery."""

from .base import EpisodeMetrics, TrainStats, run_episode
from .config import AgentConfig
from .checkpoint import load_checkpoint, restore_agent, save_agent
from .ddpg import DDPGAgent, select_action_ddpg
from .ddqn import DDQNAgent, DuelingNetwork
from .dqn import DQNAgent
from .drqn import DRQNAgent
from .exploration import EpsilonSchedule, OUProcess, ou_step, select_action_greedy
from .pgnn import PGNNAgent
from .replay import EpisodeReplay, ReplayBuffer, SequenceWindow, Transition, sample_sequences
from .returns import (
    bellman_targets,
    discounted_returns,
    dueling_aggregate,
    dueling_aggregate_batch,
    normalize_returns,
)

ALGORITHMS = ("dqn", "ddqn", "drqn", "pgnn", "ddpg")

_AGENTS = {
    "dqn": DQNAgent,
    "ddqn": DDQNAgent,
    "drqn": DRQNAgent,
    "pgnn": PGNNAgent,
    "ddpg": DDPGAgent,
}


def make_agent(algorithm: str, obs_size: int, n_actions: int,
               cfg: AgentConfig | None = None, seed: int = 0):
    if algorithm not in _AGENTS:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}"
        )
    return _AGENTS[algorithm](obs_size, n_actions, cfg or AgentConfig(), seed)


__all__ = [
    "ALGORITHMS", "make_agent",
    "EpisodeMetrics", "TrainStats", "run_episode",
    "AgentConfig",
    "load_checkpoint", "restore_agent", "save_agent",
    "DDPGAgent", "select_action_ddpg",
    "DDQNAgent", "DuelingNetwork",
    "DQNAgent", "DRQNAgent", "PGNNAgent",
    "EpsilonSchedule", "OUProcess", "ou_step", "select_action_greedy",
    "EpisodeReplay", "ReplayBuffer", "SequenceWindow", "Transition",
    "sample_sequences",
    "bellman_targets", "discounted_returns", "dueling_aggregate",
    "dueling_aggregate_batch", "normalize_returns",
]
