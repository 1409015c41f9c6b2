"""Simplified Raft layer gating adaptation actions behind a majority vote."""

from .bus import BusMessage, FaultProfile, MessageBus, step_bus
from .gate import ElectionFailedError, GateOutcome, NotLeaderError, RaftGate
from .peers import (
    Ballot,
    CANDIDATE,
    FOLLOWER,
    LEADER,
    LogEntry,
    ManagerPeer,
    OUTCOME_COMMITTED,
    OUTCOME_PENDING,
    OUTCOME_REJECTED,
    Proposal,
    cast_vote,
    tally,
)

__all__ = [
    "BusMessage", "FaultProfile", "MessageBus", "step_bus",
    "ElectionFailedError", "GateOutcome", "NotLeaderError", "RaftGate",
    "Ballot", "CANDIDATE", "FOLLOWER", "LEADER", "LogEntry", "ManagerPeer",
    "OUTCOME_COMMITTED", "OUTCOME_PENDING", "OUTCOME_REJECTED",
    "Proposal", "cast_vote", "tally",
]
