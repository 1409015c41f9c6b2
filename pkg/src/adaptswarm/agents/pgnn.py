"""Policy-gradient planner: softmax policy trained on normalised returns.

Gradients are scaled by each step's standardised return and averaged over
a batch of completed episodes, so good trajectories become more likely
and bad ones less so.
"""

from __future__ import annotations

import numpy as np

from ..nn.losses import PROB_FLOOR
from ..nn.network import Dense, Flatten, Network, backprop, network_forward_batch
from ..nn.optim import OptimizerState
from .config import AgentConfig
from .base import TrainStats
from .replay import Transition
from .returns import discounted_returns, normalize_returns


class PGNNAgent:
    algorithm = "pgnn"

    def __init__(self, obs_size: int, n_actions: int, cfg: AgentConfig, seed: int):
        self.cfg = cfg
        self.n_actions = n_actions
        ss = np.random.SeedSequence(seed)
        net_seed, rng_seed = (int(s) for s in ss.generate_state(2))
        self.rng = np.random.default_rng(rng_seed)
        layers = [Flatten()]
        if cfg.pgnn_hidden > 0:
            layers.append(Dense(cfg.pgnn_hidden, "relu"))
        layers.append(Dense(n_actions, "softmax"))
        self.policy = Network(obs_size, layers, seed=net_seed)
        self.opt = OptimizerState.adam(self.policy.parameter_arrays(), lr=cfg.lr)
        self._episode: list[Transition] = []
        self._pending: list[list[Transition]] = []

    def begin_episode(self) -> None:
        self._episode = []

    def action_probabilities(self, obs: np.ndarray) -> np.ndarray:
        p, _ = network_forward_batch(self.policy, np.asarray(obs, dtype=np.float64)[None, :])
        return p[0]

    def select_action(self, obs: np.ndarray) -> tuple[int, float]:
        p = self.action_probabilities(obs)
        u = self.rng.random()
        action = int(np.searchsorted(np.cumsum(p), u))
        action = min(action, self.n_actions - 1)
        return action, float(np.log(max(p[action], PROB_FLOOR)))

    def observe(self, tr: Transition) -> None:
        self._episode.append(tr)

    def train_step(self) -> TrainStats | None:
        return None  # updates happen on episode batches

    def end_episode(self) -> TrainStats | None:
        if self._episode:
            self._pending.append(self._episode)
        self._episode = []
        if len(self._pending) < self.cfg.pgnn_batch_episodes:
            return None
        episodes, self._pending = self._pending, []
        return self._fit(episodes)

    def _fit(self, episodes: list[list[Transition]]) -> TrainStats | None:
        returns: list[float] = []
        for ep in episodes:
            returns.extend(discounted_returns([t.r for t in ep], self.cfg.gamma))
        if len(returns) < 2:
            return None
        g_hat = normalize_returns(returns)
        s = np.stack([t.s for ep in episodes for t in ep])
        a = np.array([t.a for ep in episodes for t in ep])
        n = len(a)
        probs, tape = network_forward_batch(self.policy, s)
        chosen = np.maximum(probs[np.arange(n), a], PROB_FLOOR)
        loss = float(np.mean(-g_hat * np.log(chosen)))
        dp = np.zeros_like(probs)
        dp[np.arange(n), a] = -g_hat / chosen / n
        grads, _ = backprop(self.policy, tape, dp)
        self.policy.apply_gradients(self.opt, grads)
        return TrainStats(
            loss=loss,
            mean_q=float(np.mean(np.log(chosen))),
            mae=float(np.mean(np.abs(g_hat))),
        )

    def networks(self) -> dict[str, Network]:
        return {"policy": self.policy}

    def load_networks(self, nets: dict[str, Network]) -> None:
        self.policy.copy_from(nets["policy"])
