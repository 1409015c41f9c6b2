"""Experiment configuration: file defaults overridden by CLI flags."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..agents import ALGORITHMS
from ..agents.config import AgentConfig
from ..cluster.config import ClusterConfig, ConfigError
from ..env.environment import EnvConfig, RaftConfig

OUT_DIR_ENV = "ADAPT_SWARM_OUT"

_SECTIONS = ("cluster", "env", "raft", "agent", "episodes", "seeds", "algorithm")


@dataclass
class ExperimentConfig:
    algorithm: str
    episodes: int = 200
    seeds: list[int] = field(default_factory=lambda: [42])
    out_dir: Path = field(default_factory=lambda: Path(os.environ.get(OUT_DIR_ENV, "out")))
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    raft: RaftConfig = field(default_factory=RaftConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        if self.episodes < 1:
            raise ConfigError("episodes must be >= 1")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        self.out_dir = Path(self.out_dir)

    def snapshot(self) -> dict:
        """JSON-ready view of everything that shapes the run (paths excluded)."""

        def plain(obj):
            if hasattr(obj, "__dataclass_fields__"):
                return {k: plain(getattr(obj, k)) for k in obj.__dataclass_fields__}
            if isinstance(obj, (list, tuple)):
                return [plain(x) for x in obj]
            if isinstance(obj, dict):
                return {str(k): plain(v) for k, v in obj.items()}
            return obj

        return {
            "algorithm": self.algorithm,
            "episodes": self.episodes,
            "seeds": list(self.seeds),
            "cluster": plain(self.cluster),
            "env": plain(self.env),
            "raft": plain(self.raft),
            "agent": plain(self.agent),
        }

    def config_hash(self) -> str:
        raw = json.dumps(self.snapshot(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(raw).hexdigest()[:16]


def load_config_file(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return data


def build_config(algorithm: str, episodes: int | None = None,
                 seeds: list[int] | None = None, out_dir: str | None = None,
                 file_data: dict | None = None) -> ExperimentConfig:
    """Assemble a config: file values first, explicit arguments win."""
    data = dict(file_data or {})
    kwargs = {}
    kwargs["algorithm"] = algorithm or data.get("algorithm")
    if kwargs["algorithm"] is None:
        raise ConfigError("an algorithm tag is required")
    kwargs["episodes"] = episodes if episodes is not None else data.get("episodes", 200)
    kwargs["seeds"] = seeds if seeds is not None else data.get("seeds", [42])
    if out_dir is not None:
        kwargs["out_dir"] = Path(out_dir)
    if "cluster" in data:
        kwargs["cluster"] = ClusterConfig.from_dict(data["cluster"])
    if "env" in data:
        kwargs["env"] = EnvConfig.from_dict(data["env"])
    if "raft" in data:
        kwargs["raft"] = RaftConfig.from_dict(data["raft"])
    if "agent" in data:
        kwargs["agent"] = AgentConfig.from_dict(data["agent"])
    return ExperimentConfig(**kwargs)
