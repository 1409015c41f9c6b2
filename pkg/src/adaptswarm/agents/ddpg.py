"""Actor-critic planner with OU exploration noise and soft target updates.

The actor emits a 10-component preference vector; the executed discrete
action is its argmax after noise, and the noisy vector itself is stored
so the critic stays differentiable in the action argument.
"""

from __future__ import annotations

import numpy as np

from ..nn.network import Dense, Flatten, Network, backprop, network_forward_batch
from ..nn.optim import OptimizerState, soft_update
from .config import AgentConfig
from .base import TrainStats
from .exploration import OUProcess, ou_step
from .replay import ReplayBuffer, Transition


def select_action_ddpg(actor: Network, obs: np.ndarray, ou: OUProcess,
                       rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Noisy preference vector and its argmax (ties to the lowest index)."""
    pref, _ = network_forward_batch(actor, np.asarray(obs, dtype=np.float64)[None, :])
    noisy = pref[0] + ou_step(ou, rng)
    return int(np.argmax(noisy)), noisy


class DDPGAgent:
    algorithm = "ddpg"

    def __init__(self, obs_size: int, n_actions: int, cfg: AgentConfig, seed: int):
        self.cfg = cfg
        self.n_actions = n_actions
        self.obs_size = obs_size
        ss = np.random.SeedSequence(seed)
        a_seed, c_seed, buf_seed, rng_seed = (int(s) for s in ss.generate_state(4))
        self.rng = np.random.default_rng(rng_seed)
        h = cfg.hidden_units
        self.actor = Network(obs_size, [
            Flatten(), Dense(h, "relu"), Dense(h, "relu"),
            Dense(n_actions, "softmax"),
        ], seed=a_seed)
        # critic consumes the observation concatenated with the action vector
        self.critic = Network(obs_size + n_actions, [
            Flatten(), Dense(h, "relu"), Dense(h, "relu"), Dense(1, "linear"),
        ], seed=c_seed)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self.actor_opt = OptimizerState.adam(self.actor.parameter_arrays(),
                                             lr=cfg.actor_lr)
        self.critic_opt = OptimizerState.adam(self.critic.parameter_arrays(),
                                              lr=cfg.critic_lr)
        self.buffer = ReplayBuffer(cfg.buffer_capacity, seed=buf_seed)
        self.ou = OUProcess(size=n_actions, theta=cfg.ou_theta,
                            sigma=cfg.ou_sigma, dt=cfg.ou_dt)
        self.observe_count = 0
        self._last_pref: np.ndarray | None = None

    def begin_episode(self) -> None:
        self.ou.reset()

    def select_action(self, obs: np.ndarray) -> tuple[int, float]:
        action, pref = select_action_ddpg(self.actor, obs, self.ou, self.rng)
        self._last_pref = pref
        qin = np.concatenate([np.asarray(obs, dtype=np.float64), pref])
        q, _ = network_forward_batch(self.critic, qin[None, :])
        return action, float(q[0, 0])

    def observe(self, tr: Transition) -> None:
        tr.a_vec = self._last_pref
        self.buffer.add(tr)
        self.observe_count += 1

    def train_step(self) -> TrainStats | None:
        if len(self.buffer) < self.cfg.batch_size:
            return None
        if self.observe_count % self.cfg.train_every != 0:
            return None
        batch = self.buffer.sample(self.cfg.batch_size)
        b = len(batch)
        s = np.stack([t.s for t in batch])
        av = np.stack([t.a_vec for t in batch])
        r = np.array([t.r for t in batch])
        s2 = np.stack([t.s2 for t in batch])
        done = np.array([float(t.done) for t in batch])

        # critic regression toward the target-bootstrapped value
        a2, _ = network_forward_batch(self.actor_target, s2)
        q2, _ = network_forward_batch(self.critic_target, np.hstack([s2, a2]))
        y = r + self.cfg.gamma * q2[:, 0] * (1.0 - done)
        q, ctape = network_forward_batch(self.critic, np.hstack([s, av]))
        resid = q[:, 0] - y
        dq = (2.0 * resid / b)[:, None]
        cgrads, _ = backprop(self.critic, ctape, dq)
        self.critic.apply_gradients(self.critic_opt, cgrads)

        # actor ascends dQ/da through the freshly updated critic
        a_pred, atape = network_forward_batch(self.actor, s)
        qa, ctape2 = network_forward_batch(self.critic, np.hstack([s, a_pred]))
        dqa = np.full((b, 1), -1.0 / b)
        _, dx = backprop(self.critic, ctape2, dqa)
        da = dx[:, self.obs_size:]
        agrads, _ = backprop(self.actor, atape, da)
        self.actor.apply_gradients(self.actor_opt, agrads)

        tau = self.cfg.ddpg_tau
        soft_update(self.critic_target.parameter_arrays(),
                    self.critic.parameter_arrays(), tau)
        soft_update(self.actor_target.parameter_arrays(),
                    self.actor.parameter_arrays(), tau)
        self.critic_target.version += 1
        self.actor_target.version += 1
        return TrainStats(
            loss=float(np.mean(resid * resid)),
            mean_q=float(np.mean(qa[:, 0])),
            mae=float(np.mean(np.abs(resid))),
        )

    def end_episode(self) -> TrainStats | None:
        return None

    def networks(self) -> dict[str, Network]:
        return {
            "actor": self.actor, "critic": self.critic,
            "actor_target": self.actor_target, "critic_target": self.critic_target,
        }

    def load_networks(self, nets: dict[str, Network]) -> None:
        for name, net in self.networks().items():
            net.copy_from(nets[name])
