"""Ground-truth cluster state records."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROLE_LEADER = "leader"
ROLE_MANAGER = "manager"
ROLE_WORKER = "worker"


@dataclass
class NodeState:
    id: int
    role: str
    alive: bool = True
    cpu_capacity: float = 1000.0
    mem_capacity: float = 4096.0
    disk_capacity: float = 100.0
    net_capacity: float = 125.0


@dataclass
class ServiceState:
    id: int
    name: str
    replicas: int
    cpu_limit: float  # per replica
    mem_limit: float  # per replica
    placement: list[int] = field(default_factory=list)  # node id per replica
    healthy: list[bool] = field(default_factory=list)
    workload_ref: int = 0  # index into the workload model list
    demand_fraction: float = 1.0  # halves on split, doubles on merge
    split_of: int | None = None  # parent service id when born from a split


@dataclass
class MetricsSample:
    tick: int
    node_cpu: np.ndarray  # utilisation in [0, 1.2]
    node_mem: np.ndarray
    node_disk: np.ndarray  # [0, 1]
    node_net: np.ndarray
    service_util: dict[int, float]  # service id -> cpu utilisation
    service_demand: dict[int, float]
