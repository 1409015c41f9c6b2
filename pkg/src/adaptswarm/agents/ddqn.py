"""Dueling value learner: shared trunk with separate value/advantage heads.

The name keeps the experiment tag used across this project; there is no
double-Q target correction here, the architecture is the dueling split.
"""

from __future__ import annotations

import numpy as np

from ..nn.network import Dense, Flatten, Network, backprop, network_forward_batch
from ..nn.optim import OptimizerState
from .config import AgentConfig
from .dqn import DQNAgent
from .base import TrainStats
from .replay import Transition
from .returns import bellman_targets, dueling_aggregate_batch


class DuelingNetwork:
    """Trunk -> (value scalar, advantage vector) -> aggregated Q."""

    def __init__(self, obs_size: int, n_actions: int, hidden: int, mode: str,
                 seed: int | None = 0, rng: np.random.Generator | None = None):
        if rng is None:
            rng = np.random.default_rng(seed)
        self.mode = mode
        self.trunk = Network(obs_size, [Flatten(), Dense(hidden, "relu")], rng=rng)
        self.value = Network(hidden, [Dense(1, "linear")], rng=rng)
        self.advantage = Network(hidden, [Dense(n_actions, "linear")], rng=rng)

    @property
    def subnets(self) -> list[Network]:
        return [self.trunk, self.value, self.advantage]

    def parameter_arrays(self) -> list[np.ndarray]:
        out = []
        for net in self.subnets:
            out.extend(net.parameter_arrays())
        return out

    def forward_batch(self, x: np.ndarray):
        h, t_trunk = network_forward_batch(self.trunk, x)
        v, t_value = network_forward_batch(self.value, h)
        adv, t_adv = network_forward_batch(self.advantage, h)
        q = dueling_aggregate_batch(v[:, 0], adv, self.mode)
        return q, (t_trunk, t_value, t_adv)

    def backward(self, tapes, dq: np.ndarray) -> list[np.ndarray]:
        t_trunk, t_value, t_adv = tapes
        dv = np.sum(dq, axis=1, keepdims=True)
        if self.mode == "mean_centered":
            dadv = dq - np.mean(dq, axis=1, keepdims=True)
        else:
            dadv = dq
        g_value, dh_v = backprop(self.value, t_value, dv)
        g_adv, dh_a = backprop(self.advantage, t_adv, dadv)
        g_trunk, _ = backprop(self.trunk, t_trunk, dh_v + dh_a)
        return g_trunk + g_value + g_adv

    def apply_gradients(self, opt: OptimizerState, grads: list[np.ndarray]) -> None:
        from ..nn.optim import optimizer_step

        optimizer_step(opt, self.parameter_arrays(), grads)
        for net in self.subnets:
            net.version += 1

    def copy(self) -> "DuelingNetwork":
        clone = DuelingNetwork.__new__(DuelingNetwork)
        clone.mode = self.mode
        clone.trunk = self.trunk.copy()
        clone.value = self.value.copy()
        clone.advantage = self.advantage.copy()
        return clone

    def copy_from(self, other: "DuelingNetwork") -> None:
        for mine, theirs in zip(self.subnets, other.subnets):
            mine.copy_from(theirs)

    def head_widths(self) -> tuple[int, int]:
        return self.value.output_dim, self.advantage.output_dim


class DDQNAgent(DQNAgent):
    algorithm = "ddqn"

    def __init__(self, obs_size: int, n_actions: int, cfg: AgentConfig, seed: int):
        self.cfg = cfg
        self.n_actions = n_actions
        ss = np.random.SeedSequence(seed)
        net_seed, buf_seed, rng_seed = (int(s) for s in ss.generate_state(3))
        self.rng = np.random.default_rng(rng_seed)
        self.online = DuelingNetwork(obs_size, n_actions, cfg.hidden_units,
                                     cfg.dueling_mode, seed=net_seed)
        self.target = self.online.copy()
        self.opt = OptimizerState.adam(self.online.parameter_arrays(), lr=cfg.lr)
        from .replay import ReplayBuffer
        from .exploration import EpsilonSchedule

        self.buffer = ReplayBuffer(cfg.buffer_capacity, seed=buf_seed)
        self.schedule = EpsilonSchedule(cfg.epsilon_start, cfg.epsilon_min,
                                        cfg.epsilon_decay_steps)
        self.select_count = 0
        self.observe_count = 0
        self.train_count = 0

    def _q_single(self, obs: np.ndarray) -> np.ndarray:
        q, _ = self.online.forward_batch(obs[None, :])
        return q[0]

    def _fit(self, batch: list[Transition]) -> TrainStats:
        b = len(batch)
        s = np.stack([t.s for t in batch])
        a = np.array([t.a for t in batch])
        r = np.array([t.r for t in batch])
        s2 = np.stack([t.s2 for t in batch])
        done = np.array([float(t.done) for t in batch])
        next_q, _ = self.target.forward_batch(s2)
        y = bellman_targets(r, done, next_q, self.cfg.gamma)
        q, tapes = self.online.forward_batch(s)
        pred = q[np.arange(b), a]
        resid = pred - y
        dq = np.zeros_like(q)
        dq[np.arange(b), a] = 2.0 * resid / b
        grads = self.online.backward(tapes, dq)
        self.online.apply_gradients(self.opt, grads)
        self.train_count += 1
        if self.train_count % self.cfg.target_update_every == 0:
            self.target.copy_from(self.online)
        return TrainStats(
            loss=float(np.mean(resid * resid)),
            mean_q=float(np.mean(pred)),
            mae=float(np.mean(np.abs(resid))),
        )

    def networks(self) -> dict[str, Network]:
        return {
            "online_trunk": self.online.trunk,
            "online_value": self.online.value,
            "online_advantage": self.online.advantage,
            "target_trunk": self.target.trunk,
            "target_value": self.target.value,
            "target_advantage": self.target.advantage,
        }

    def load_networks(self, nets: dict[str, Network]) -> None:
        self.online.trunk.copy_from(nets["online_trunk"])
        self.online.value.copy_from(nets["online_value"])
        self.online.advantage.copy_from(nets["online_advantage"])
        self.target.trunk.copy_from(nets["target_trunk"])
        self.target.value.copy_from(nets["target_value"])
        self.target.advantage.copy_from(nets["target_advantage"])
