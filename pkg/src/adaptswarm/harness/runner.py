"""Seeded experiment execution with incremental CSV output and a manifest."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..agents import make_agent, run_episode
from ..env.environment import AdaptationEnv
from .config import ExperimentConfig

CSV_HEADER = "episode,steps,total_reward,mean_q,mae,loss,adaptation_time_s,converged"

# pgnn has no Q estimate; its mean_q column carries log pi(a|s) and its mae
# column the mean absolute normalised return.
MEAN_Q_SEMANTICS = {
    "dqn": "online Q(s,a) at selection",
    "ddqn": "online Q(s,a) at selection",
    "drqn": "online Q(s,a) at selection",
    "pgnn": "log pi(a|s) at selection",
    "ddpg": "critic Q(s, actor preference) at selection",
}


def format_row(m) -> str:
    conv = "true" if m.converged else "false"
    return (
        f"{m.episode},{m.steps},{m.total_reward!r},{m.mean_q!r},{m.mae!r},"
        f"{m.loss!r},{m.adaptation_time_s!r},{conv}"
    )


@dataclass
class RunManifest:
    algorithm: str
    config_hash: str
    config: dict
    seeds: list[int]
    episodes: int
    code_version: str = __version__
    status: str = "running"
    started_at: str = ""
    finished_at: str = ""
    csv_files: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    mean_q_semantics: str = ""

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


def episode_seeds(run_seed: int, episodes: int) -> list[int]:
    """Per-episode seeds derived deterministically from the run seed."""
    state = np.random.SeedSequence(run_seed).generate_state(episodes)
    return [int(s) for s in state]


def run_experiment(config: ExperimentConfig) -> Path:
    """Run each seed to completion; returns the experiment directory.

    One CSV per seed, flushed row by row; the manifest is written before
    the first episode and finalised after the last (or marked failed).
    """
    exp_dir = config.out_dir / config.algorithm
    exp_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        algorithm=config.algorithm,
        config_hash=config.config_hash(),
        config=config.snapshot(),
        seeds=list(config.seeds),
        episodes=config.episodes,
        started_at=time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
        mean_q_semantics=MEAN_Q_SEMANTICS[config.algorithm],
    )
    manifest_path = exp_dir / "manifest.json"
    for seed in config.seeds:
        manifest.csv_files[str(seed)] = f"seed{seed}.csv"
    manifest.write(manifest_path)
    try:
        for seed in config.seeds:
            _run_seed(config, exp_dir / f"seed{seed}.csv", seed)
    except Exception:
        manifest.status = "failed"
        manifest.finished_at = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
        manifest.write(manifest_path)
        raise
    manifest.status = "completed"
    manifest.finished_at = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    manifest.write(manifest_path)
    return exp_dir


def _run_seed(config: ExperimentConfig, csv_path: Path, seed: int) -> None:
    env = AdaptationEnv(cluster=config.cluster, env=config.env, raft=config.raft)
    agent = make_agent(config.algorithm, env.observation_size, env.n_actions,
                       config.agent, seed=seed)
    seeds = episode_seeds(seed, config.episodes)
    with csv_path.open("w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.flush()
        for ep in range(1, config.episodes + 1):
            metrics, _ = run_episode(agent, env, seeds[ep - 1], ep)
            fh.write(format_row(metrics) + "\n")
            fh.flush()
