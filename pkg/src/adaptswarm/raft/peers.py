"""Manager peers, proposals, ballots, and the per-peer voting rules."""

from __future__ import annotations

from dataclasses import dataclass, field

FOLLOWER = "follower"
CANDIDATE = "candidate"
LEADER = "leader"

OUTCOME_PENDING = "pending"
OUTCOME_COMMITTED = "committed"
OUTCOME_REJECTED = "rejected"


@dataclass
class LogEntry:
    term: int
    index: int
    action: str
    outcome: str = OUTCOME_PENDING


@dataclass
class Proposal:
    term: int
    index: int
    action: str
    proposer: int


@dataclass
class Ballot:
    proposal: Proposal
    votes: dict[int, bool] = field(default_factory=dict)
    outcome: str = OUTCOME_PENDING

    def record_vote(self, voter: int, approve: bool) -> None:
        # duplicate votes are idempotent; the first one stands
        if voter not in self.votes:
            self.votes[voter] = approve


class ManagerPeer:
    """One manager's replicated state machine view."""

    def __init__(self, peer_id: int, election_timeout: int):
        self.id = peer_id
        self.current_term = 0
        self.role = FOLLOWER
        self.voted_for: int | None = None
        self.log: list[LogEntry] = []
        self.alive = True
        self.election_timeout = election_timeout
        self.timer = 0
        self.heartbeat_timer = 0
        self.votes_granted: set[int] = set()

    def last_point(self) -> tuple[int, int]:
        if not self.log:
            return (0, -1)
        tail = self.log[-1]
        return (tail.term, tail.index)

    def adopt_term(self, term: int) -> None:
        """Step down into the newer term; clears the per-term vote."""
        if term > self.current_term:
            self.current_term = term
            self.voted_for = None
            self.role = FOLLOWER
            self.votes_granted = set()

    def absorb_entry(self, term: int, index: int, action: str,
                     outcome: str = OUTCOME_PENDING) -> bool:
        """Store an entry if it extends the log contiguously (or reconciles
        an existing slot); returns whether the entry is now present."""
        if index > len(self.log):
            return False  # behind; heartbeat tails patch the gap
        if index < len(self.log):
            existing = self.log[index]
            if existing.term == term:
                if outcome != OUTCOME_PENDING:
                    existing.outcome = outcome
                return True
            if existing.term < term:
                del self.log[index:]
                self.log.append(LogEntry(term, index, action, outcome))
                return True
            return False  # incoming entry is older than what we hold
        self.log.append(LogEntry(term, index, action, outcome))
        return True

    def has_entry(self, term: int, index: int) -> bool:
        return index < len(self.log) and self.log[index].term == term


def cast_vote(peer: ManagerPeer, proposal: Proposal, local_feasibility: bool) -> bool:
    """Store the proposed entry (contiguity permitting) and vote on it.

    Deny when the proposal's term is stale, the peer cannot store it, or
    the peer's own view says the action is infeasible.
    """
    if proposal.term < peer.current_term:
        return False
    peer.adopt_term(proposal.term)
    peer.timer = 0  # proposal doubles as leader contact
    stored = peer.absorb_entry(proposal.term, proposal.index, proposal.action)
    return bool(stored and local_feasibility)


def tally(ballot: Ballot, n_managers: int) -> str:
    """Majority of all configured managers commits; anything else rejects.
    The outcome is immutable once set."""
    if ballot.outcome != OUTCOME_PENDING:
        return ballot.outcome
    quorum = n_managers // 2 + 1
    approvals = sum(1 for ok in ballot.votes.values() if ok)
    ballot.outcome = OUTCOME_COMMITTED if approvals >= quorum else OUTCOME_REJECTED
    return ballot.outcome
