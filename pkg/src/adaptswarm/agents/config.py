"""Shared planner hyperparameters, all surfaced in the experiment config."""

from __future__ import annotations

from dataclasses import dataclass, fields

from ..cluster.config import ConfigError


@dataclass
class AgentConfig:
    gamma: float = 0.95
    lr: float = 1e-3
    hidden_units: int = 20
    epsilon_start: float = 1.0
    epsilon_min: float = 0.05
    epsilon_decay_steps: int = 5000
    buffer_capacity: int = 50000
    batch_size: int = 32
    target_update_every: int = 500
    train_every: int = 1
    drqn_seq_len: int = 8
    drqn_hidden: int = 20
    pgnn_batch_episodes: int = 10
    pgnn_hidden: int = 0  # 0 disables the optional hidden layer
    dueling_mode: str = "mean_centered"  # or "paper_literal"
    ddpg_tau: float = 0.005
    ou_theta: float = 0.15
    ou_sigma: float = 0.2
    ou_dt: float = 1.0
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ConfigError("gamma must lie in [0, 1)")
        if self.dueling_mode not in ("mean_centered", "paper_literal"):
            raise ConfigError(f"unknown dueling mode {self.dueling_mode!r}")
        if not (0.0 <= self.epsilon_min <= self.epsilon_start <= 1.0):
            raise ConfigError("epsilon schedule must satisfy 0 <= min <= start <= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "AgentConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown agent keys: {sorted(unknown)}")
        return cls(**data)
