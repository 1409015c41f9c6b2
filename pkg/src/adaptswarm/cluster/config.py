"""Cluster and workload configuration with strict key validation."""

from __future__ import annotations

from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


def _strict_fields(cls, data: dict, where: str) -> dict:
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")
    return data


@dataclass
class ServiceSpec:
    name: str
    replicas: int = 1
    cpu_limit: float = 100.0  # millicores per replica
    mem_limit: float = 256.0  # MB per replica

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceSpec":
        return cls(**_strict_fields(cls, data, "service"))


@dataclass
class WorkloadSpec:
    base: float = 100.0  # millicores of demand
    amplitude: float = 0.0
    period: float = 120.0  # ticks
    noise_sigma: float = 0.0
    spike_prob: float = 0.0
    spike_mult: float = 1.5

    @classmethod
    def from_dict(cls, data: dict) -> "WorkloadSpec":
        return cls(**_strict_fields(cls, data, "workload"))


def _default_services() -> list[ServiceSpec]:
    return [
        ServiceSpec(name="svc-frontend", replicas=2, cpu_limit=100.0, mem_limit=256.0),
        ServiceSpec(name="svc-backend", replicas=1, cpu_limit=200.0, mem_limit=256.0),
    ]


def _default_workloads() -> list[WorkloadSpec]:
    return [
        WorkloadSpec(base=300.0, amplitude=15.0, period=120.0, noise_sigma=3.0,
                     spike_prob=0.01, spike_mult=1.5),
        WorkloadSpec(base=30.0, amplitude=4.0, period=90.0, noise_sigma=1.0,
                     spike_prob=0.01, spike_mult=1.5),
    ]


@dataclass
class ClusterConfig:
    managers: int = 3
    workers: int = 2
    cpu_capacity: float = 1000.0  # millicores per node
    mem_capacity: float = 4096.0  # MB
    disk_capacity: float = 100.0  # GB
    net_capacity: float = 125.0  # MB/s
    p_fail: float = 0.002  # per node per tick
    disk_growth: float = 0.001  # utilisation fraction added per tick
    disk_reclaim: float = 0.05  # freed on nodes touched by a scale event
    init_disk: float = 0.3
    mem_per_cpu: float = 2.0  # MB of memory demand per millicore of cpu demand
    net_per_cpu: float = 0.2  # MB/s per millicore of cpu demand
    min_replicas: int = 1
    max_replicas: int = 8
    max_services: int = 2
    min_cpu_limit: float = 25.0
    max_cpu_limit: float = 1000.0
    min_mem_limit: float = 64.0
    max_mem_limit: float = 4096.0
    services: list[ServiceSpec] = field(default_factory=_default_services)
    workloads: list[WorkloadSpec] = field(default_factory=_default_workloads)

    def __post_init__(self):
        if self.managers < 1:
            raise ConfigError("cluster needs at least one manager node")
        if not self.services:
            raise ConfigError("cluster needs at least one service")
        if len(self.workloads) != len(self.services):
            raise ConfigError("one workload spec is required per service")
        if self.max_services < len(self.services):
            raise ConfigError("max_services smaller than configured service count")
        for cap in (self.cpu_capacity, self.mem_capacity, self.disk_capacity,
                    self.net_capacity):
            if cap <= 0:
                raise ConfigError("node capacities must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterConfig":
        data = dict(_strict_fields(cls, data, "cluster"))
        if "services" in data:
            data["services"] = [ServiceSpec.from_dict(s) for s in data["services"]]
        if "workloads" in data:
            data["workloads"] = [WorkloadSpec.from_dict(w) for w in data["workloads"]]
        return cls(**data)

    @property
    def node_count(self) -> int:
        return self.managers + self.workers
