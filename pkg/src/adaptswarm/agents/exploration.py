"""Exploration machinery: epsilon schedules, greedy selection, OU noise."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn.layers import PreconditionError
from ..nn.network import Network, network_forward


@dataclass
class EpsilonSchedule:
    start: float = 1.0
    minimum: float = 0.05
    decay_steps: int = 5000

    def value(self, step: int) -> float:
        """Linear decay from start to minimum over decay_steps selections."""
        if self.decay_steps <= 0 or step >= self.decay_steps:
            return self.minimum
        frac = max(0.0, step / self.decay_steps)
        return self.start + (self.minimum - self.start) * frac


def select_action_greedy(net: Network, obs: np.ndarray, epsilon: float,
                         rng: np.random.Generator) -> int:
    """Epsilon-greedy over the net's action values; ties go to the lowest index."""
    if not 0.0 <= epsilon <= 1.0:
        raise PreconditionError(f"epsilon must lie in [0,1], got {epsilon}")
    q, _ = network_forward(net, obs)
    if rng.random() < epsilon:
        return int(rng.integers(0, q.shape[-1]))
    return int(np.argmax(q))


@dataclass
class OUProcess:
    """Mean-reverting noise: x += theta*(mu-x)*dt + sigma*sqrt(dt)*N(0,1)."""

    size: int
    theta: float = 0.15
    mu: float = 0.0
    sigma: float = 0.2
    dt: float = 1.0
    x: np.ndarray = field(init=False)

    def __post_init__(self):
        self.x = np.full(self.size, self.mu, dtype=np.float64)

    def reset(self) -> None:
        self.x = np.full(self.size, self.mu, dtype=np.float64)


def ou_step(p: OUProcess, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(p.size)
    p.x = p.x + p.theta * (p.mu - p.x) * p.dt + p.sigma * np.sqrt(p.dt) * noise
    return p.x.copy()
