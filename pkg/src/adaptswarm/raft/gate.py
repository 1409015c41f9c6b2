"""Consensus gate: leader proposes, managers vote, majority commits.

All peers run in one process, stepped tick by tick through the seeded
message bus, so elections, heartbeats, and ballots interleave
deterministically for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bus import FaultProfile, MessageBus, step_bus
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


class NotLeaderError(RuntimeError):
    """The proposing peer is not the current leader."""


class ElectionFailedError(RuntimeError):
    """No leader emerged within the round budget."""


@dataclass
class GateOutcome:
    committed: bool
    reason: str | None
    term: int
    index: int


HEARTBEAT_TAIL = 8  # log entries piggybacked on each heartbeat


class RaftGate:
    def __init__(self, manager_ids, seed: int, profile: FaultProfile | None = None,
                 heartbeat_every: int = 3, timeout_range: tuple[int, int] = (10, 20),
                 vote_timeout: int = 25, max_election_rounds: int = 100):
        self.rng = np.random.default_rng(seed)
        self.profile = profile or FaultProfile()
        self.heartbeat_every = heartbeat_every
        self.timeout_range = timeout_range
        self.vote_timeout = vote_timeout
        self.max_election_rounds = max_election_rounds
        self.bus = MessageBus()
        self.tick_count = 0
        self.peers: dict[int, ManagerPeer] = {}
        for pid in manager_ids:
            self.peers[pid] = ManagerPeer(pid, self._new_timeout())
        self._ballot: Ballot | None = None
        self._feasibility = None
        self._election_rounds = 0
        # safety bookkeeping, checked by the fuzz harness
        self.leaders_by_term: dict[int, set[int]] = {}
        self.committed_ledger: list[tuple[int, int, str]] = []
        self.grants_by_term: dict[tuple[int, int], int] = {}
        self.violations: list[str] = []

    # ---- structure -------------------------------------------------------

    @property
    def n_managers(self) -> int:
        return len(self.peers)

    @property
    def quorum(self) -> int:
        return self.n_managers // 2 + 1

    def _new_timeout(self) -> int:
        lo, hi = self.timeout_range
        return int(self.rng.integers(lo, hi + 1))

    def alive_peers(self) -> list[ManagerPeer]:
        return [p for p in self.peers.values() if p.alive]

    @property
    def leader_id(self) -> int | None:
        best = None
        for p in self.peers.values():
            if p.alive and p.role == LEADER:
                if best is None or p.current_term > best.current_term:
                    best = p
        return best.id if best else None

    def set_alive(self, peer_id: int, alive: bool) -> None:
        peer = self.peers[peer_id]
        if peer.alive == alive:
            return
        peer.alive = alive
        if alive:
            # rejoin as a follower with a fresh timeout
            peer.role = FOLLOWER
            peer.timer = 0
            peer.election_timeout = self._new_timeout()

    def max_term(self) -> int:
        return max(p.current_term for p in self.peers.values())

    # ---- ticking ---------------------------------------------------------

    def tick(self) -> None:
        self.tick_count += 1
        for when, pid in self.profile.crashes:
            if when == self.tick_count and pid in self.peers:
                self.set_alive(pid, False)
        for msg in step_bus(self.bus, self.profile, self.rng, self.tick_count):
            peer = self.peers.get(msg.receiver)
            if peer is not None and peer.alive:
                self._dispatch(peer, msg)
        for pid in sorted(self.peers):
            peer = self.peers[pid]
            if not peer.alive:
                continue
            if peer.role == LEADER:
                peer.heartbeat_timer += 1
                if peer.heartbeat_timer >= self.heartbeat_every:
                    peer.heartbeat_timer = 0
                    self._send_heartbeats(peer)
            else:
                peer.timer += 1
                if peer.timer >= peer.election_timeout:
                    self._start_election(peer)

    def _broadcast(self, sender: ManagerPeer, kind: str, payload: dict) -> None:
        for pid in sorted(self.peers):
            if pid != sender.id:
                self.bus.send(kind, sender.id, pid, payload, self.tick_count)

    # ---- elections -------------------------------------------------------

    def _start_election(self, peer: ManagerPeer) -> None:
        peer.current_term += 1
        peer.role = CANDIDATE
        peer.voted_for = peer.id
        peer.votes_granted = {peer.id}
        peer.timer = 0
        peer.election_timeout = self._new_timeout()
        self._election_rounds += 1
        last_term, last_index = peer.last_point()
        self._broadcast(peer, "vote_request", {
            "term": peer.current_term, "candidate": peer.id,
            "last_term": last_term, "last_index": last_index,
        })
        self._maybe_win(peer)

    def _maybe_win(self, peer: ManagerPeer) -> None:
        if peer.role == CANDIDATE and len(peer.votes_granted) >= self.quorum:
            peer.role = LEADER
            peer.heartbeat_timer = 0
            self._record_leader(peer)
            self._send_heartbeats(peer)

    def _record_leader(self, peer: ManagerPeer) -> None:
        holders = self.leaders_by_term.setdefault(peer.current_term, set())
        holders.add(peer.id)
        if len(holders) > 1:
            self.violations.append(
                f"election safety: term {peer.current_term} leaders {sorted(holders)}"
            )
        for term, index, action in self.committed_ledger:
            if not peer.has_entry(term, index):
                self.violations.append(
                    f"commit safety: leader {peer.id} (term {peer.current_term}) "
                    f"missing committed entry ({term},{index},{action})"
                )

    def run_election(self) -> tuple[int, int]:
        """Tick until a leader exists; raises after the round budget."""
        if len(self.alive_peers()) < self.quorum:
            raise ElectionFailedError("no quorum of alive managers")
        start_rounds = self._election_rounds
        while True:
            leader = self.leader_id
            if leader is not None:
                return leader, self.peers[leader].current_term
            if self._election_rounds - start_rounds > self.max_election_rounds:
                raise ElectionFailedError(
                    f"no leader after {self.max_election_rounds} election rounds"
                )
            self.tick()

    # ---- heartbeats ------------------------------------------------------

    def _send_heartbeats(self, leader: ManagerPeer) -> None:
        tail = [
            (e.term, e.index, e.action, e.outcome)
            for e in leader.log[-HEARTBEAT_TAIL:]
        ]
        self._broadcast(leader, "heartbeat", {
            "term": leader.current_term, "leader": leader.id, "tail": tail,
        })

    # ---- proposals -------------------------------------------------------

    def propose(self, proposer_id: int, action: str) -> Proposal:
        """Leader-only: append the entry locally and broadcast it for votes."""
        peer = self.peers[proposer_id]
        if peer.role != LEADER or not peer.alive or proposer_id != self.leader_id:
            raise NotLeaderError(f"peer {proposer_id} is not the current leader")
        proposal = Proposal(term=peer.current_term, index=len(peer.log),
                            action=action, proposer=proposer_id)
        peer.log.append(LogEntry(proposal.term, proposal.index, action))
        self._broadcast(peer, "propose", {
            "term": proposal.term, "index": proposal.index, "action": action,
        })
        return proposal

    def ratify(self, action: str, feasibility) -> GateOutcome:
        """Run one full propose/vote/tally round for an action.

        feasibility maps a manager id to that manager's own view of whether
        the action can be applied (a plain bool is broadcast to all).
        """
        if not callable(feasibility):
            fixed = bool(feasibility)
            feasibility = lambda _pid: fixed  # noqa: E731
        leader_id = self.leader_id
        if leader_id is None:
            try:
                leader_id, _ = self.run_election()
            except ElectionFailedError:
                return GateOutcome(False, "election_failed", self.max_term(), -1)
        leader = self.peers[leader_id]
        proposal = self.propose(leader_id, action)
        ballot = Ballot(proposal=proposal)
        ballot.record_vote(leader_id, bool(feasibility(leader_id)))
        self._ballot = ballot
        self._feasibility = feasibility

        expected = {p.id for p in self.alive_peers()}
        for _ in range(self.vote_timeout):
            if expected.issubset(ballot.votes.keys()):
                break
            self.tick()
            if not leader.alive or leader.role != LEADER:
                break
            expected = {p.id for p in self.alive_peers()}
        self._ballot = None
        self._feasibility = None

        if not leader.alive or leader.role != LEADER:
            return GateOutcome(False, "leader_lost", proposal.term, proposal.index)

        outcome = tally(ballot, self.n_managers)
        entry = leader.log[proposal.index]
        entry.outcome = outcome
        if outcome == OUTCOME_COMMITTED:
            approvals = sum(1 for ok in ballot.votes.values() if ok)
            if approvals < self.quorum:
                self.violations.append(
                    f"majority rule: ballot ({proposal.term},{proposal.index}) "
                    f"committed with {approvals} approvals"
                )
            self.committed_ledger.append((proposal.term, proposal.index, action))
        self._broadcast(leader, "commit", {
            "term": proposal.term, "index": proposal.index,
            "action": action, "outcome": outcome,
        })
        committed = outcome == OUTCOME_COMMITTED
        return GateOutcome(committed, None if committed else "vote_denied",
                           proposal.term, proposal.index)

    # ---- message handling --------------------------------------------------

    def _dispatch(self, peer: ManagerPeer, msg) -> None:
        kind = msg.kind
        payload = msg.payload
        if kind == "propose":
            proposal = Proposal(term=payload["term"], index=payload["index"],
                                action=payload["action"], proposer=msg.sender)
            if proposal.term < peer.current_term:
                approve = False
            else:
                feas = self._feasibility(peer.id) if self._feasibility else True
                approve = cast_vote(peer, proposal, bool(feas))
            self.bus.send("vote", peer.id, msg.sender, {
                "term": proposal.term, "index": proposal.index,
                "approve": approve, "voter_term": peer.current_term,
            }, self.tick_count)
        elif kind == "vote":
            if payload["voter_term"] > peer.current_term:
                peer.adopt_term(payload["voter_term"])  # stale leader steps down
                return
            b = self._ballot
            if (b is not None and peer.role == LEADER
                    and payload["term"] == b.proposal.term
                    and payload["index"] == b.proposal.index):
                b.record_vote(msg.sender, bool(payload["approve"]))
        elif kind == "commit":
            if payload["term"] >= peer.current_term:
                peer.adopt_term(payload["term"])
                peer.timer = 0
                peer.absorb_entry(payload["term"], payload["index"],
                                  payload["action"], payload["outcome"])
        elif kind == "heartbeat":
            if payload["term"] < peer.current_term:
                self.bus.send("term_notice", peer.id, msg.sender,
                              {"term": peer.current_term}, self.tick_count)
                return
            peer.adopt_term(payload["term"])
            if peer.role == CANDIDATE:
                peer.role = FOLLOWER
            peer.timer = 0
            for term, index, action, outcome in payload["tail"]:
                peer.absorb_entry(term, index, action, outcome)
        elif kind == "vote_request":
            term = payload["term"]
            if term < peer.current_term:
                granted = False
            else:
                peer.adopt_term(term)
                up_to_date = (
                    (payload["last_term"], payload["last_index"]) >= peer.last_point()
                )
                granted = (peer.voted_for in (None, payload["candidate"])
                           and up_to_date)
                if granted:
                    if peer.voted_for is None:
                        key = (peer.id, term)
                        self.grants_by_term[key] = self.grants_by_term.get(key, 0) + 1
                        if self.grants_by_term[key] > 1:
                            self.violations.append(
                                f"vote uniqueness: peer {peer.id} granted twice in term {term}"
                            )
                    peer.voted_for = payload["candidate"]
                    peer.timer = 0
            self.bus.send("vote_grant", peer.id, msg.sender, {
                "term": term, "granted": granted, "voter_term": peer.current_term,
            }, self.tick_count)
        elif kind == "vote_grant":
            if payload["voter_term"] > peer.current_term:
                peer.adopt_term(payload["voter_term"])
                return
            if (peer.role == CANDIDATE and payload["granted"]
                    and payload["term"] == peer.current_term):
                peer.votes_granted.add(msg.sender)
                self._maybe_win(peer)
        elif kind == "term_notice":
            peer.adopt_term(payload["term"])

    # ---- introspection -----------------------------------------------------

    def committed_entries(self, peer_id: int) -> list[LogEntry]:
        return [e for e in self.peers[peer_id].log if e.outcome == OUTCOME_COMMITTED]
