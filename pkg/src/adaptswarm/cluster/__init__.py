"""Seeded cluster simulator: nodes, services, workload, failures, actions."""

from .config import ClusterConfig, ConfigError, ServiceSpec, WorkloadSpec
from .simulator import (
    ActionOutcome,
    ClusterSim,
    CPU_UTIL_MAX,
    REASON_AT_BOUND,
    REASON_NO_CAPACITY,
    REASON_NO_FAILED_NODE,
    init_cluster,
)
from .state import MetricsSample, NodeState, ServiceState
from .workload import demand

__all__ = [
    "ClusterConfig", "ConfigError", "ServiceSpec", "WorkloadSpec",
    "ActionOutcome", "ClusterSim", "CPU_UTIL_MAX", "init_cluster",
    "REASON_AT_BOUND", "REASON_NO_CAPACITY", "REASON_NO_FAILED_NODE",
    "MetricsSample", "NodeState", "ServiceState", "demand",
]
