"""Deterministic stand-in for a container-swarm cluster.

Utilisation follows a closed-form model (demand over allocation, clamped
at 1.2 for overload); every mutation is a pure function of the previous
state, the committed action, and the seeded generator.
"""

from __future__ import annotations

import json

import numpy as np

from ..actions import ActionKind, AdaptationAction
from .config import ClusterConfig, ConfigError
from .state import (
    MetricsSample,
    NodeState,
    ROLE_LEADER,
    ROLE_MANAGER,
    ROLE_WORKER,
    ServiceState,
)
from .workload import demand

CPU_UTIL_MAX = 1.2

REASON_AT_BOUND = "at_bound"
REASON_NO_CAPACITY = "insufficient_capacity"
REASON_NO_FAILED_NODE = "no_failed_node"


class ActionOutcome:
    __slots__ = ("applied", "reason")

    def __init__(self, applied: bool, reason: str | None = None):
        self.applied = applied
        self.reason = reason

    def __repr__(self):
        return f"ActionOutcome(applied={self.applied}, reason={self.reason!r})"


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


class ClusterSim:
    """Seeded cluster with nodes, services, workload, failures, and actions."""

    def __init__(self, config: ClusterConfig, seed: int):
        self.config = config
        self.rng = np.random.default_rng(seed)
        self.clock = 0
        self.nodes: list[NodeState] = []
        for i in range(config.node_count):
            if i == 0:
                role = ROLE_LEADER
            elif i < config.managers:
                role = ROLE_MANAGER
            else:
                role = ROLE_WORKER
            self.nodes.append(NodeState(
                id=i, role=role,
                cpu_capacity=config.cpu_capacity,
                mem_capacity=config.mem_capacity,
                disk_capacity=config.disk_capacity,
                net_capacity=config.net_capacity,
            ))
        self.disk_used = np.full(config.node_count, config.init_disk)
        self.metrics: MetricsSample | None = None
        self.services: list[ServiceState] = []
        self._next_service_id = 0
        for i, spec in enumerate(config.services):
            svc = ServiceState(
                id=self._next_service_id, name=spec.name, replicas=0,
                cpu_limit=spec.cpu_limit, mem_limit=spec.mem_limit,
                workload_ref=i,
            )
            self._next_service_id += 1
            self.services.append(svc)
            for _ in range(spec.replicas):
                node = self._pick_node(svc.cpu_limit)
                if node is None:
                    raise ConfigError(
                        f"initial replicas of {spec.name} do not fit the cluster"
                    )
                svc.placement.append(node)
                svc.healthy.append(True)
                svc.replicas += 1
        self.metrics = self._sample()

    # ---- helpers ---------------------------------------------------------

    def manager_ids(self) -> list[int]:
        return [n.id for n in self.nodes if n.role in (ROLE_LEADER, ROLE_MANAGER)]

    def node(self, node_id: int) -> NodeState:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(f"unknown node id {node_id}")

    def service(self, service_id: int) -> ServiceState | None:
        for s in self.services:
            if s.id == service_id:
                return s
        return None

    def set_leader(self, node_id: int) -> None:
        for n in self.nodes:
            if n.role == ROLE_LEADER:
                n.role = ROLE_MANAGER
        self.node(node_id).role = ROLE_LEADER

    def _allocated_cpu(self, node_id: int, skip_service: int | None = None) -> float:
        total = 0.0
        for s in self.services:
            if s.id == skip_service:
                continue
            total += s.cpu_limit * s.placement.count(node_id)
        return total

    def _allocated_mem(self, node_id: int, skip_service: int | None = None) -> float:
        total = 0.0
        for s in self.services:
            if s.id == skip_service:
                continue
            total += s.mem_limit * s.placement.count(node_id)
        return total

    def _pick_node(self, cpu_limit: float) -> int | None:
        """Least cpu-utilised alive node with room.

        Utilisation ties break by lowest allocated share (spread
        scheduling), then by lowest node id.
        """
        best = None
        best_key = None
        for n in self.nodes:
            if not n.alive:
                continue
            allocated = self._allocated_cpu(n.id)
            if allocated + cpu_limit > n.cpu_capacity + 1e-9:
                continue
            util = self.metrics.node_cpu[n.id] if self.metrics is not None else 0.0
            key = (round(util, 9), allocated / n.cpu_capacity, n.id)
            if best is None or key < best_key:
                best, best_key = n.id, key
        return best

    # ---- metrics ---------------------------------------------------------

    def _sample(self) -> MetricsSample:
        cfg = self.config
        n = cfg.node_count
        node_cpu = np.zeros(n)
        node_mem = np.zeros(n)
        node_net = np.zeros(n)
        svc_util: dict[int, float] = {}
        svc_demand: dict[int, float] = {}
        for s in self.services:
            d = demand(cfg.workloads[s.workload_ref], self.clock, self.rng)
            d *= s.demand_fraction
            svc_demand[s.id] = d
            healthy = sum(s.healthy)
            if healthy == 0:
                svc_util[s.id] = 0.0 if d <= 0 else CPU_UTIL_MAX
                continue
            svc_util[s.id] = _clamp(d / (healthy * s.cpu_limit), 0.0, CPU_UTIL_MAX)
            share = d / healthy
            cpu_use = min(share, s.cpu_limit)
            mem_use = min(share * cfg.mem_per_cpu, s.mem_limit)
            net_use = share * cfg.net_per_cpu
            for node_id, ok in zip(s.placement, s.healthy):
                if not ok:
                    continue
                node_cpu[node_id] += cpu_use
                node_mem[node_id] += mem_use
                node_net[node_id] += net_use
        for node in self.nodes:
            node_cpu[node.id] = _clamp(node_cpu[node.id] / node.cpu_capacity, 0.0, CPU_UTIL_MAX)
            node_mem[node.id] = _clamp(node_mem[node.id] / node.mem_capacity, 0.0, CPU_UTIL_MAX)
            node_net[node.id] = _clamp(node_net[node.id] / node.net_capacity, 0.0, CPU_UTIL_MAX)
        node_disk = np.clip(self.disk_used, 0.0, 1.0)
        return MetricsSample(
            tick=self.clock, node_cpu=node_cpu, node_mem=node_mem,
            node_disk=node_disk.copy(), node_net=node_net,
            service_util=svc_util, service_demand=svc_demand,
        )

    def tick(self) -> MetricsSample:
        """Advance one simulated second: demand, failures, fresh metrics."""
        self.clock += 1
        for node in self.nodes:
            if node.alive:
                self.disk_used[node.id] = _clamp(
                    self.disk_used[node.id] + self.config.disk_growth, 0.0, 1.0)
        for node in self.nodes:
            if not node.alive:
                continue
            if self.rng.random() < self.config.p_fail:
                self._kill(node.id)
        self.metrics = self._sample()
        return self.metrics

    def _kill(self, node_id: int) -> None:
        node = self.node(node_id)
        node.alive = False
        for s in self.services:
            for i, placed in enumerate(s.placement):
                if placed == node_id:
                    s.healthy[i] = False

    def inject_failure(self, node_id: int) -> None:
        self.node(node_id)  # raises on unknown id
        self._kill(node_id)

    def recover(self, node_id: int) -> None:
        """Revive a node and reschedule every unhealthy replica."""
        node = self.node(node_id)
        node.alive = True
        for s in self.services:
            for i, ok in enumerate(s.healthy):
                if ok:
                    continue
                if self.node(s.placement[i]).alive:
                    s.healthy[i] = True  # node is back, replica restarts in place
                    continue
                target = self._pick_node(s.cpu_limit)
                if target is not None:
                    s.placement[i] = target
                    s.healthy[i] = True

    # ---- convergence -----------------------------------------------------

    def is_converged(self, slo_low: float = 0.2, slo_high: float = 0.8,
                     last_action_rejected: bool = False) -> bool:
        if last_action_rejected:
            return False
        for s in self.services:
            util = self.metrics.service_util[s.id]
            if not (slo_low <= util <= slo_high):
                return False
            if not all(s.healthy):
                return False
        for node in self.nodes:
            if node.alive:
                continue
            placed = any(node.id in s.placement for s in self.services)
            if placed:
                return False
        return True

    def violation(self, slo_low: float = 0.2, slo_high: float = 0.8) -> float:
        """Total SLO-band overshoot plus undershoot across services."""
        v = 0.0
        for s in self.services:
            util = self.metrics.service_util[s.id]
            v += max(0.0, util - slo_high) + max(0.0, slo_low - util)
        return v

    # ---- actions ---------------------------------------------------------

    def check_action(self, action: AdaptationAction) -> tuple[bool, str | None]:
        """Dry-run feasibility on the current state; mirrors apply_action."""
        return self._validate(action)

    def apply_action(self, action: AdaptationAction) -> ActionOutcome:
        ok, reason = self._validate(action)
        if not ok:
            return ActionOutcome(False, reason)
        self._mutate(action)
        return ActionOutcome(True, None)

    def _validate(self, action: AdaptationAction) -> tuple[bool, str | None]:
        kind = action.kind
        cfg = self.config
        if kind == ActionKind.NOOP_PRESERVE_STATE:
            return True, None
        if kind == ActionKind.AUTO_RECOVER:
            if all(n.alive for n in self.nodes):
                return False, REASON_NO_FAILED_NODE
            return True, None
        svc = self.service(action.service)
        if svc is None:
            return False, REASON_AT_BOUND
        if kind == ActionKind.SCALE_OUT:
            if svc.replicas >= cfg.max_replicas:
                return False, REASON_AT_BOUND
            if self._pick_node(svc.cpu_limit) is None:
                return False, REASON_NO_CAPACITY
            return True, None
        if kind == ActionKind.SCALE_IN:
            if svc.replicas <= cfg.min_replicas:
                return False, REASON_AT_BOUND
            return True, None
        if kind == ActionKind.SCALE_UP_CPU:
            new = svc.cpu_limit * 1.25
            if new > cfg.max_cpu_limit:
                return False, REASON_AT_BOUND
            if not self._limits_fit(svc, cpu_limit=new):
                return False, REASON_NO_CAPACITY
            return True, None
        if kind == ActionKind.SCALE_DOWN_CPU:
            if svc.cpu_limit * 0.75 < cfg.min_cpu_limit:
                return False, REASON_AT_BOUND
            return True, None
        if kind == ActionKind.SCALE_UP_MEM:
            new = svc.mem_limit * 1.25
            if new > cfg.max_mem_limit:
                return False, REASON_AT_BOUND
            if not self._limits_fit(svc, mem_limit=new):
                return False, REASON_NO_CAPACITY
            return True, None
        if kind == ActionKind.SCALE_DOWN_MEM:
            if svc.mem_limit * 0.75 < cfg.min_mem_limit:
                return False, REASON_AT_BOUND
            return True, None
        if kind == ActionKind.COMPOSE_SPLIT:
            if len(self.services) >= cfg.max_services:
                return False, REASON_AT_BOUND
            if svc.cpu_limit / 2.0 < cfg.min_cpu_limit or svc.mem_limit / 2.0 < cfg.min_mem_limit:
                return False, REASON_AT_BOUND
            if self._split_placement(svc) is None:
                return False, REASON_NO_CAPACITY
            return True, None
        if kind == ActionKind.COMPOSE_MERGE:
            child = self._split_child(svc.id)
            if child is None:
                return False, REASON_AT_BOUND
            if svc.cpu_limit * 2.0 > cfg.max_cpu_limit or svc.mem_limit * 2.0 > cfg.max_mem_limit:
                return False, REASON_AT_BOUND
            if not self._merge_fits(svc, child):
                return False, REASON_NO_CAPACITY
            return True, None
        raise ValueError(f"unknown action kind {kind}")

    def _limits_fit(self, svc: ServiceState, cpu_limit: float | None = None,
                    mem_limit: float | None = None) -> bool:
        cl = svc.cpu_limit if cpu_limit is None else cpu_limit
        ml = svc.mem_limit if mem_limit is None else mem_limit
        for node in self.nodes:
            count = svc.placement.count(node.id)
            if count == 0:
                continue
            if self._allocated_cpu(node.id, skip_service=svc.id) + cl * count > node.cpu_capacity + 1e-9:
                return False
            if self._allocated_mem(node.id, skip_service=svc.id) + ml * count > node.mem_capacity + 1e-9:
                return False
        return True

    def _split_placement(self, svc: ServiceState) -> list[int] | None:
        """Placement for a child with svc.replicas replicas at half limits,
        assuming the parent's limits drop to half as well; None if it cannot fit."""
        half = svc.cpu_limit / 2.0
        extra: dict[int, float] = {}
        placement = []
        for _ in range(svc.replicas):
            best, best_key = None, None
            for node in self.nodes:
                if not node.alive:
                    continue
                used = (self._allocated_cpu(node.id, skip_service=svc.id)
                        + half * svc.placement.count(node.id)
                        + extra.get(node.id, 0.0))
                if used + half > node.cpu_capacity + 1e-9:
                    continue
                util = self.metrics.node_cpu[node.id]
                key = (round(util, 9), used / node.cpu_capacity, node.id)
                if best is None or key < best_key:
                    best, best_key = node.id, key
            if best is None:
                return None
            placement.append(best)
            extra[best] = extra.get(best, 0.0) + half
        return placement

    def _split_child(self, parent_id: int) -> ServiceState | None:
        for s in reversed(self.services):
            if s.split_of == parent_id:
                return s
        return None

    def _merge_fits(self, svc: ServiceState, child: ServiceState) -> bool:
        for node in self.nodes:
            count = svc.placement.count(node.id)
            if count == 0:
                continue
            used = (self._allocated_cpu(node.id, skip_service=svc.id)
                    - child.cpu_limit * child.placement.count(node.id))
            if used + svc.cpu_limit * 2.0 * count > node.cpu_capacity + 1e-9:
                return False
        return True

    def _mutate(self, action: AdaptationAction) -> None:
        kind = action.kind
        touched: set[int] = set()
        if kind == ActionKind.NOOP_PRESERVE_STATE:
            return
        if kind == ActionKind.AUTO_RECOVER:
            dead = [n.id for n in self.nodes if not n.alive]
            self.recover(min(dead))
            touched.update(dead[:1])
        else:
            svc = self.service(action.service)
            if kind == ActionKind.SCALE_OUT:
                node = self._pick_node(svc.cpu_limit)
                svc.placement.append(node)
                svc.healthy.append(True)
                svc.replicas += 1
                touched.add(node)
            elif kind == ActionKind.SCALE_IN:
                touched.add(svc.placement.pop())
                svc.healthy.pop()
                svc.replicas -= 1
            elif kind == ActionKind.SCALE_UP_CPU:
                svc.cpu_limit *= 1.25
                touched.update(svc.placement)
            elif kind == ActionKind.SCALE_DOWN_CPU:
                svc.cpu_limit *= 0.75
                touched.update(svc.placement)
            elif kind == ActionKind.SCALE_UP_MEM:
                svc.mem_limit *= 1.25
                touched.update(svc.placement)
            elif kind == ActionKind.SCALE_DOWN_MEM:
                svc.mem_limit *= 0.75
                touched.update(svc.placement)
            elif kind == ActionKind.COMPOSE_SPLIT:
                placement = self._split_placement(svc)
                svc.cpu_limit /= 2.0
                svc.mem_limit /= 2.0
                svc.demand_fraction /= 2.0
                child = ServiceState(
                    id=self._next_service_id, name=f"{svc.name}-split",
                    replicas=len(placement), cpu_limit=svc.cpu_limit,
                    mem_limit=svc.mem_limit, placement=placement,
                    healthy=[True] * len(placement),
                    workload_ref=svc.workload_ref,
                    demand_fraction=svc.demand_fraction, split_of=svc.id,
                )
                self._next_service_id += 1
                self.services.append(child)
                touched.update(placement)
            elif kind == ActionKind.COMPOSE_MERGE:
                child = self._split_child(svc.id)
                touched.update(child.placement)
                touched.update(svc.placement)
                self.services.remove(child)
                svc.cpu_limit *= 2.0
                svc.mem_limit *= 2.0
                svc.demand_fraction *= 2.0
        for node_id in touched:
            if node_id is not None:
                self.disk_used[node_id] = _clamp(
                    self.disk_used[node_id] - self.config.disk_reclaim, 0.0, 1.0)
        # refresh utilisation against the new allocation at the same demand
        self._resample_utils()

    def _resample_utils(self) -> None:
        m = self.metrics
        for s in self.services:
            d = m.service_demand.get(s.id)
            if d is None:
                # service born from a split inherits half the parent demand
                parent = self.service(s.split_of) if s.split_of is not None else None
                d = m.service_demand.get(parent.id, 0.0) if parent else 0.0
                m.service_demand[s.id] = d
            healthy = sum(s.healthy)
            if healthy == 0:
                m.service_util[s.id] = 0.0 if d <= 0 else CPU_UTIL_MAX
            else:
                m.service_util[s.id] = _clamp(d / (healthy * s.cpu_limit), 0.0, CPU_UTIL_MAX)
        for sid in list(m.service_util):
            if self.service(sid) is None:
                del m.service_util[sid]
                del m.service_demand[sid]

    # ---- snapshots -------------------------------------------------------

    def snapshot(self) -> str:
        """Deterministic text serialisation of the observable state."""
        doc = {
            "clock": self.clock,
            "nodes": [
                {
                    "id": n.id, "role": n.role, "alive": n.alive,
                    "cpu": n.cpu_capacity, "mem": n.mem_capacity,
                    "disk": n.disk_capacity, "net": n.net_capacity,
                    "disk_used": float(self.disk_used[n.id]),
                }
                for n in self.nodes
            ],
            "services": [
                {
                    "id": s.id, "name": s.name, "replicas": s.replicas,
                    "cpu_limit": s.cpu_limit, "mem_limit": s.mem_limit,
                    "placement": list(s.placement), "healthy": list(s.healthy),
                    "fraction": s.demand_fraction, "split_of": s.split_of,
                }
                for s in self.services
            ],
            "metrics": {
                "tick": self.metrics.tick,
                "node_cpu": [float(x) for x in self.metrics.node_cpu],
                "node_mem": [float(x) for x in self.metrics.node_mem],
                "node_disk": [float(x) for x in self.metrics.node_disk],
                "node_net": [float(x) for x in self.metrics.node_net],
                "service_util": {str(k): v for k, v in sorted(self.metrics.service_util.items())},
            },
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def init_cluster(config: ClusterConfig, seed: int) -> ClusterSim:
    """Build a fresh cluster: all nodes alive, one leader, clock zero."""
    return ClusterSim(config, seed)
