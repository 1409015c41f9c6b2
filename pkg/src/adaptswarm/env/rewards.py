"""Step reward: convergence bonus, rejection and step costs, SLO shaping."""

from __future__ import annotations

from dataclasses import dataclass, fields

from ..cluster.config import ConfigError


@dataclass
class RewardConfig:
    c_conv: float = 100.0  # paid once when the step converges the cluster
    c_fail: float = 10.0  # charged when the vote rejects the action
    c_step: float = 1.0  # charged every step
    c_viol: float = 5.0  # scales the SLO-band violation magnitude

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"reward constant {f.name} must be >= 0")

    @classmethod
    def from_dict(cls, data: dict) -> "RewardConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown reward keys: {sorted(unknown)}")
        return cls(**data)


def compute_reward(applied: bool, violation: float, converged: bool,
                   cfg: RewardConfig) -> float:
    """r = c_conv*[converged] - c_fail*[rejected] - c_step - c_viol*violation."""
    r = -cfg.c_step - cfg.c_viol * violation
    if not applied:
        r -= cfg.c_fail
    if converged:
        r += cfg.c_conv
    return float(r)


def sparse_reward(applied: bool, converged: bool, cfg: RewardConfig) -> float:
    """The unshaped variant (no violation term), reported in step info."""
    r = -cfg.c_step
    if not applied:
        r -= cfg.c_fail
    if converged:
        r += cfg.c_conv
    return float(r)
