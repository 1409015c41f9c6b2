"""Value learner over a flatten/dense/dense Q network with replay."""

from __future__ import annotations

import numpy as np

from ..nn.network import Dense, Flatten, Network, backprop, network_forward_batch
from ..nn.optim import OptimizerState
from .config import AgentConfig
from .base import TrainStats
from .exploration import EpsilonSchedule
from .replay import ReplayBuffer, Transition
from .returns import bellman_targets


class DQNAgent:
    algorithm = "dqn"

    def __init__(self, obs_size: int, n_actions: int, cfg: AgentConfig, seed: int):
        self.cfg = cfg
        self.n_actions = n_actions
        ss = np.random.SeedSequence(seed)
        net_seed, buf_seed, rng_seed = (int(s) for s in ss.generate_state(3))
        self.rng = np.random.default_rng(rng_seed)
        self.online = self._build(obs_size, n_actions, net_seed)
        self.target = self.online.copy()
        self.opt = OptimizerState.adam(self.online.parameter_arrays(), lr=cfg.lr)
        self.buffer = ReplayBuffer(cfg.buffer_capacity, seed=buf_seed)
        self.schedule = EpsilonSchedule(cfg.epsilon_start, cfg.epsilon_min,
                                        cfg.epsilon_decay_steps)
        self.select_count = 0
        self.observe_count = 0
        self.train_count = 0

    def _build(self, obs_size: int, n_actions: int, seed: int) -> Network:
        return Network(obs_size, [
            Flatten(),
            Dense(self.cfg.hidden_units, "relu"),
            Dense(n_actions, "linear"),
        ], seed=seed)

    def begin_episode(self) -> None:
        pass

    def _q_single(self, obs: np.ndarray) -> np.ndarray:
        q, _ = network_forward_batch(self.online, obs[None, :])
        return q[0]

    def select_action(self, obs: np.ndarray) -> tuple[int, float]:
        eps = self.schedule.value(self.select_count)
        self.select_count += 1
        q = self._q_single(np.asarray(obs, dtype=np.float64))
        if self.rng.random() < eps:
            action = int(self.rng.integers(0, self.n_actions))
        else:
            action = int(np.argmax(q))
        return action, float(q[action])

    def observe(self, tr: Transition) -> None:
        self.buffer.add(tr)
        self.observe_count += 1

    def train_step(self) -> TrainStats | None:
        if len(self.buffer) < self.cfg.batch_size:
            return None
        if self.observe_count % self.cfg.train_every != 0:
            return None
        batch = self.buffer.sample(self.cfg.batch_size)
        return self._fit(batch)

    def _fit(self, batch: list[Transition]) -> TrainStats:
        b = len(batch)
        s = np.stack([t.s for t in batch])
        a = np.array([t.a for t in batch])
        r = np.array([t.r for t in batch])
        s2 = np.stack([t.s2 for t in batch])
        done = np.array([float(t.done) for t in batch])
        next_q, _ = network_forward_batch(self.target, s2)
        y = bellman_targets(r, done, next_q, self.cfg.gamma)
        q, tape = network_forward_batch(self.online, s)
        pred = q[np.arange(b), a]
        resid = pred - y
        dq = np.zeros_like(q)
        dq[np.arange(b), a] = 2.0 * resid / b
        grads, _ = backprop(self.online, tape, dq)
        self.online.apply_gradients(self.opt, grads)
        self.train_count += 1
        if self.train_count % self.cfg.target_update_every == 0:
            self.target.copy_from(self.online)
        return TrainStats(
            loss=float(np.mean(resid * resid)),
            mean_q=float(np.mean(pred)),
            mae=float(np.mean(np.abs(resid))),
        )

    def end_episode(self) -> TrainStats | None:
        return None

    def networks(self) -> dict[str, Network]:
        return {"online": self.online, "target": self.target}

    def load_networks(self, nets: dict[str, Network]) -> None:
        self.online.copy_from(nets["online"])
        self.target.copy_from(nets["target"])
