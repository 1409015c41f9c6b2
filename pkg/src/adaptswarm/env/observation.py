"""Fixed-length observation vectors built from cluster metrics."""

from __future__ import annotations

import numpy as np

from ..cluster.simulator import ClusterSim

NODE_FEATURES = 4  # cpu, mem, disk, net utilisation
SERVICE_FEATURES = 2  # normalised replica count, cpu utilisation


def observation_size(max_nodes: int, max_services: int) -> int:
    return NODE_FEATURES * max_nodes + SERVICE_FEATURES * max_services


def build_observation(sim: ClusterSim) -> np.ndarray:
    """Per-node utilisations in node-id order then per-service features.

    Dead nodes and unoccupied service slots contribute zeros, so the
    length never changes within a configuration.
    """
    cfg = sim.config
    m = sim.metrics
    out = np.zeros(observation_size(cfg.node_count, cfg.max_services))
    for node in sim.nodes:
        base = node.id * NODE_FEATURES
        if not node.alive:
            continue
        out[base + 0] = m.node_cpu[node.id]
        out[base + 1] = m.node_mem[node.id]
        out[base + 2] = m.node_disk[node.id]
        out[base + 3] = m.node_net[node.id]
    svc_base = cfg.node_count * NODE_FEATURES
    live = sorted(sim.services, key=lambda s: s.id)[:cfg.max_services]
    for slot, svc in enumerate(live):
        out[svc_base + slot * SERVICE_FEATURES] = svc.replicas / cfg.max_replicas
        out[svc_base + slot * SERVICE_FEATURES + 1] = m.service_util[svc.id]
    return out
