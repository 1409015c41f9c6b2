"""The adaptation environment: observations in, vote-gated actions out."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from ..actions import AdaptationAction, DEFAULT_DURATIONS, build_action_table
from ..cluster.config import ClusterConfig, ConfigError
from ..cluster.simulator import ClusterSim
from ..raft.bus import FaultProfile
from ..raft.gate import RaftGate
from .observation import build_observation, observation_size
from .rewards import RewardConfig, compute_reward, sparse_reward

N_ACTIONS = 10


class EpisodeDoneError(RuntimeError):
    """step() was called after the episode finished."""


@dataclass
class EnvConfig:
    slo_low: float = 0.2
    slo_high: float = 0.8
    max_steps: int = 200
    reward: RewardConfig = field(default_factory=RewardConfig)
    durations: dict = field(default_factory=lambda: dict(DEFAULT_DURATIONS))
    action_services: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "EnvConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown env keys: {sorted(unknown)}")
        data = dict(data)
        if "reward" in data:
            data["reward"] = RewardConfig.from_dict(data["reward"])
        if "durations" in data:
            durations = dict(DEFAULT_DURATIONS)
            unknown = set(data["durations"]) - set(durations)
            if unknown:
                raise ConfigError(f"unknown duration keys: {sorted(unknown)}")
            durations.update(data["durations"])
            data["durations"] = durations
        return cls(**data)


@dataclass
class RaftConfig:
    drop_prob: float = 0.0
    delay_min: int = 0
    delay_max: int = 1
    heartbeat_every: int = 3
    timeout_min: int = 10
    timeout_max: int = 20
    vote_timeout: int = 25
    crashes: list = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict) -> "RaftConfig":
        allowed = {f.name for f in fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown raft keys: {sorted(unknown)}")
        return cls(**data)

    def fault_profile(self) -> FaultProfile:
        return FaultProfile(drop_prob=self.drop_prob, delay_min=self.delay_min,
                            delay_max=self.delay_max,
                            crashes=[tuple(c) for c in self.crashes])


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict


class AdaptationEnv:
    """Gym-style environment over the simulated cluster and the vote gate."""

    def __init__(self, cluster: ClusterConfig | None = None,
                 env: EnvConfig | None = None, raft: RaftConfig | None = None):
        self.cluster_config = cluster or ClusterConfig()
        self.env_config = env or EnvConfig()
        self.raft_config = raft or RaftConfig()
        svc_count = len(self.cluster_config.services)
        for key, svc in self.env_config.action_services.items():
            if not 0 <= int(svc) < svc_count:
                raise ConfigError(
                    f"action {key} bound to missing service {svc}"
                )
        table = build_action_table(self.env_config.action_services)
        # default bindings assume two services; clamp them for smaller clusters
        self.actions = [
            a if a.service is None or a.service < svc_count
            else AdaptationAction(a.kind, svc_count - 1)
            for a in table
        ]
        self.n_actions = N_ACTIONS
        self.observation_size = observation_size(
            self.cluster_config.node_count, self.cluster_config.max_services)
        self.sim: ClusterSim | None = None
        self.gate: RaftGate | None = None
        self._done = True
        self._steps = 0

    def action_duration(self, index: int) -> float:
        """Simulated seconds charged for attempting action `index`."""
        return float(self.env_config.durations[self.actions[index].kind.value])

    def reset(self, seed: int) -> np.ndarray:
        ss = np.random.SeedSequence(seed)
        sim_seed, gate_seed = ss.generate_state(2)
        self.sim = ClusterSim(self.cluster_config, int(sim_seed))
        rc = self.raft_config
        self.gate = RaftGate(
            self.sim.manager_ids(), seed=int(gate_seed),
            profile=rc.fault_profile(), heartbeat_every=rc.heartbeat_every,
            timeout_range=(rc.timeout_min, rc.timeout_max),
            vote_timeout=rc.vote_timeout,
        )
        # node 0 starts as the configured swarm leader
        leader = self.gate.peers[self.sim.manager_ids()[0]]
        leader.role = "leader"
        self.gate.leaders_by_term.setdefault(0, set()).add(leader.id)
        self._done = False
        self._steps = 0
        return build_observation(self.sim)

    def step(self, action_index: int) -> StepResult:
        if self._done:
            raise EpisodeDoneError("episode is done; call reset() first")
        if not 0 <= action_index < self.n_actions:
            raise ValueError(f"action index {action_index} outside [0, {self.n_actions})")
        action = self.actions[action_index]
        # the gate must see current node deaths so a lost leader is
        # re-elected before this proposal
        for mid in self.sim.manager_ids():
            self.gate.set_alive(mid, self.sim.node(mid).alive)
        feasible, feas_reason = self.sim.check_action(action)
        outcome = self.gate.ratify(action.key, bool(feasible))
        applied = False
        reason = outcome.reason
        if outcome.committed:
            result = self.sim.apply_action(action)
            applied = result.applied
            reason = result.reason
        elif not feasible:
            reason = feas_reason

        self.sim.tick()
        for mid in self.sim.manager_ids():
            self.gate.set_alive(mid, self.sim.node(mid).alive)
        gate_leader = self.gate.leader_id
        if gate_leader is not None and self.sim.node(gate_leader).alive:
            if self.sim.node(gate_leader).role != "leader":
                self.sim.set_leader(gate_leader)

        ec = self.env_config
        converged = applied and self.sim.is_converged(ec.slo_low, ec.slo_high)
        violation = self.sim.violation(ec.slo_low, ec.slo_high)
        reward = compute_reward(applied, violation, converged, ec.reward)
        self._steps += 1
        self._done = converged or self._steps >= ec.max_steps
        duration = self.action_duration(action_index)
        info = {
            "outcome": "applied" if applied else "rejected",
            "reason": reason,
            "violation": violation,
            "duration_s": duration,
            "converged": converged,
            "reward_sparse": sparse_reward(applied, converged, ec.reward),
        }
        return StepResult(observation=build_observation(self.sim),
                          reward=reward, done=self._done, info=info)

    def episode_done(self, step_count: int | None = None) -> bool:
        """Done means converged or the step budget ran out."""
        if step_count is None:
            return self._done
        ec = self.env_config
        converged = self.sim is not None and self.sim.is_converged(ec.slo_low, ec.slo_high)
        return converged or step_count >= ec.max_steps
