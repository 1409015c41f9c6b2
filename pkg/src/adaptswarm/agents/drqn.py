"""Recurrent value learner: GRU over observation windows, trained with BPTT.

Selection carries the hidden state across the live episode; training
resets it to zero at the start of every replayed window.
"""

from __future__ import annotations

import numpy as np

from ..nn.layers import activate, dense_forward, gru_step
from ..nn.network import Dense, Flatten, Gru, Network, backprop, network_forward_batch
from ..nn.optim import OptimizerState
from .config import AgentConfig
from .base import TrainStats
from .exploration import EpsilonSchedule
from .replay import EpisodeReplay, Transition, sample_sequences
from .returns import bellman_targets


class DRQNAgent:
    algorithm = "drqn"

    def __init__(self, obs_size: int, n_actions: int, cfg: AgentConfig, seed: int):
        self.cfg = cfg
        self.n_actions = n_actions
        self.obs_size = obs_size
        ss = np.random.SeedSequence(seed)
        net_seed, rng_seed = (int(s) for s in ss.generate_state(2))
        self.rng = np.random.default_rng(rng_seed)
        self.online = Network(obs_size, [
            Flatten(),
            Gru(cfg.drqn_hidden),
            Dense(cfg.hidden_units, "relu"),
            Dense(n_actions, "linear"),
        ], seed=net_seed)
        self.target = self.online.copy()
        self.opt = OptimizerState.adam(self.online.parameter_arrays(), lr=cfg.lr)
        self.replay = EpisodeReplay(capacity_transitions=cfg.buffer_capacity)
        self.schedule = EpsilonSchedule(cfg.epsilon_start, cfg.epsilon_min,
                                        cfg.epsilon_decay_steps)
        self.select_count = 0
        self.observe_count = 0
        self.train_count = 0
        self._hidden = np.zeros(cfg.drqn_hidden)
        self._episode: list[Transition] = []

    def begin_episode(self) -> None:
        self._hidden = np.zeros(self.cfg.drqn_hidden)
        self._episode = []

    def _q_from_hidden(self, obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Advance the live hidden state one step and read out Q."""
        gru_params = self.online.params[1]
        h = gru_step(gru_params, obs, self._hidden)
        x = h
        for spec, p in zip(self.online.layers[2:], self.online.params[2:]):
            x = activate(spec.activation, dense_forward(p, x))
        return x, h

    def select_action(self, obs: np.ndarray) -> tuple[int, float]:
        eps = self.schedule.value(self.select_count)
        self.select_count += 1
        q, h = self._q_from_hidden(np.asarray(obs, dtype=np.float64))
        self._hidden = h
        if self.rng.random() < eps:
            action = int(self.rng.integers(0, self.n_actions))
        else:
            action = int(np.argmax(q))
        return action, float(q[action])

    def observe(self, tr: Transition) -> None:
        self._episode.append(tr)
        self.observe_count += 1

    def _window_arrays(self, windows):
        L = self.cfg.drqn_seq_len
        b = len(windows)
        obs = np.zeros((b, L, self.obs_size))
        nxt = np.zeros((b, L, self.obs_size))
        mask = np.zeros((b, L))
        a = np.zeros(b, dtype=int)
        r = np.zeros(b)
        done = np.zeros(b)
        for i, win in enumerate(windows):
            pad = win.pad
            for j, tr in enumerate(win.transitions):
                obs[i, pad + j] = tr.s
                nxt[i, pad + j] = tr.s2
                mask[i, pad + j] = 1.0
            last = win.transitions[-1]
            a[i] = last.a
            r[i] = last.r
            done[i] = float(last.done)
        return obs, nxt, mask, a, r, done

    def train_step(self) -> TrainStats | None:
        if self.observe_count % self.cfg.train_every != 0:
            return None
        windows = sample_sequences(self.replay, self.cfg.batch_size,
                                   self.cfg.drqn_seq_len, self.rng)
        if windows is None:
            return None
        obs, nxt, mask, a, r, done = self._window_arrays(windows)
        b = len(windows)
        next_q, _ = network_forward_batch(self.target, nxt, mask)
        y = bellman_targets(r, done, next_q, self.cfg.gamma)
        q, tape = network_forward_batch(self.online, obs, mask)
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
        self.replay.add_episode(self._episode)
        self._episode = []
        return None

    def networks(self) -> dict[str, Network]:
        return {"online": self.online, "target": self.target}

    def load_networks(self, nets: dict[str, Network]) -> None:
        self.online.copy_from(nets["online"])
        self.target.copy_from(nets["target"])
