"""adaptswarm: a desk-scale self-adaptive microservices testbed.

A seeded cluster simulator stands in for a container swarm; adaptation
actions chosen by deep-RL planners (dqn, ddqn, drqn, pgnn, ddpg) are
ratified by a simplified Raft voting gate before they mutate the cluster.
The harness runs seeded experiments and emits per-episode metrics.
"""

__version__ = "0.1.0"
