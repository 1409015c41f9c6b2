import numpy as np
import pytest

from adaptswarm.raft import (
    Ballot,
    ElectionFailedError,
    FaultProfile,
    LEADER,
    ManagerPeer,
    MessageBus,
    NotLeaderError,
    OUTCOME_COMMITTED,
    OUTCOME_REJECTED,
    Proposal,
    RaftGate,
    cast_vote,
    step_bus,
    tally,
)


def make_gate(n=3, seed=0, **kwargs) -> RaftGate:
    gate = RaftGate(list(range(n)), seed=seed, **kwargs)
    gate.peers[0].role = LEADER
    return gate


class TestBus:
    def test_no_drops_delivers_in_delay_order(self):
        bus = MessageBus()
        profile = FaultProfile(drop_prob=0.0, delay_min=0, delay_max=3)
        rng = np.random.default_rng(0)
        for i in range(20):
            bus.send("m", 0, 1, {"i": i}, now=0)
        seen = []
        for now in range(1, 10):
            seen.extend(step_bus(bus, profile, rng, now))
        assert len(seen) == 20
        assert [m.deliver_at for m in seen] == sorted(m.deliver_at for m in seen)

    def test_full_drop_delivers_nothing(self):
        bus = MessageBus()
        profile = FaultProfile(drop_prob=1.0)
        rng = np.random.default_rng(0)
        for i in range(10):
            bus.send("m", 0, 1, {}, now=0)
        delivered = []
        for now in range(1, 6):
            delivered.extend(step_bus(bus, profile, rng, now))
        assert delivered == []
        assert bus.pending == []

    def test_fixed_seed_fixed_schedule(self):
        def schedule(seed):
            bus = MessageBus()
            profile = FaultProfile(drop_prob=0.3, delay_min=0, delay_max=4)
            rng = np.random.default_rng(seed)
            for i in range(30):
                bus.send("m", 0, 1, {"i": i}, now=0)
            out = []
            for now in range(1, 12):
                out.extend((m.payload["i"], m.deliver_at)
                           for m in step_bus(bus, profile, rng, now))
            return out

        assert schedule(5) == schedule(5)
        assert schedule(5) != schedule(6)


class TestVoting:
    def test_feasible_current_term_approves(self):
        peer = ManagerPeer(1, election_timeout=10)
        assert cast_vote(peer, Proposal(term=0, index=0, action="a", proposer=0), True)
        assert peer.log[0].action == "a"

    def test_infeasible_denies_by_local_view(self):
        peer = ManagerPeer(1, election_timeout=10)
        assert not cast_vote(peer, Proposal(term=0, index=0, action="a", proposer=0),
                             False)

    def test_stale_term_denied(self):
        peer = ManagerPeer(1, election_timeout=10)
        peer.current_term = 5
        assert not cast_vote(peer, Proposal(term=3, index=0, action="a", proposer=0),
                             True)

    def test_duplicate_votes_are_idempotent(self):
        ballot = Ballot(proposal=Proposal(term=0, index=0, action="a", proposer=0))
        ballot.record_vote(1, True)
        ballot.record_vote(1, False)  # second vote ignored
        assert ballot.votes == {1: True}


class TestTally:
    @pytest.mark.parametrize("n,approvals,expected", [
        (3, 2, OUTCOME_COMMITTED),
        (3, 1, OUTCOME_REJECTED),
        (5, 3, OUTCOME_COMMITTED),
        (5, 2, OUTCOME_REJECTED),
    ])
    def test_majority_of_total(self, n, approvals, expected):
        ballot = Ballot(proposal=Proposal(term=1, index=0, action="a", proposer=0))
        for voter in range(approvals):
            ballot.record_vote(voter, True)
        for voter in range(approvals, n):
            ballot.record_vote(voter, False)
        assert tally(ballot, n) == expected

    def test_outcome_immutable_once_set(self):
        ballot = Ballot(proposal=Proposal(term=1, index=0, action="a", proposer=0))
        ballot.record_vote(0, True)
        ballot.record_vote(1, True)
        assert tally(ballot, 3) == OUTCOME_COMMITTED
        ballot.votes[1] = False
        assert tally(ballot, 3) == OUTCOME_COMMITTED


class TestRatify:
    def test_healthy_cluster_commits(self):
        gate = make_gate()
        out = gate.ratify("scale_out:0", True)
        assert out.committed
        assert gate.peers[0].log[0].outcome == OUTCOME_COMMITTED
        # proposal reached both followers
        assert gate.peers[1].has_entry(out.term, out.index)
        assert gate.peers[2].has_entry(out.term, out.index)

    def test_infeasible_everywhere_rejects(self):
        gate = make_gate()
        out = gate.ratify("scale_in:0", False)
        assert not out.committed and out.reason == "vote_denied"

    def test_rejected_entries_stay_out_of_committed_log(self):
        gate = make_gate()
        gate.ratify("a", False)
        gate.ratify("b", True)
        committed = gate.committed_entries(0)
        assert [e.action for e in committed] == ["b"]

    def test_not_leader_propose_raises(self):
        gate = make_gate()
        with pytest.raises(NotLeaderError):
            gate.propose(1, "x")

    def test_dead_leader_triggers_election_and_new_term(self):
        gate = make_gate()
        assert gate.ratify("a", True).committed
        term_before = gate.peers[0].current_term
        gate.set_alive(0, False)
        out = gate.ratify("b", True)
        assert out.committed
        assert gate.leader_id in (1, 2)
        assert gate.peers[gate.leader_id].current_term > term_before

    def test_no_quorum_fails_election(self):
        gate = make_gate()
        gate.set_alive(0, False)
        gate.set_alive(1, False)
        out = gate.ratify("a", True)
        assert not out.committed and out.reason == "election_failed"
        with pytest.raises(ElectionFailedError):
            gate.run_election()

    def test_per_manager_feasibility_vetoes(self):
        gate = make_gate()
        # only the leader thinks the action is feasible: 1 of 3 approvals
        out = gate.ratify("a", lambda pid: pid == 0)
        assert not out.committed

    def test_majority_feasibility_commits(self):
        gate = make_gate()
        out = gate.ratify("a", lambda pid: pid in (0, 1))
        assert out.committed


class TestElections:
    def test_stale_leader_steps_down_on_deny(self):
        gate = make_gate()
        assert gate.ratify("a", True).committed
        # partition the leader away; the others elect a newer term
        gate.set_alive(0, False)
        gate.run_election()
        new_leader = gate.leader_id
        assert new_leader in (1, 2)
        # old leader comes back and tries to propose at its stale term
        gate.set_alive(0, True)
        gate.peers[0].role = LEADER
        stale = gate.peers[0]
        stale_term = stale.current_term
        assert stale_term < gate.peers[new_leader].current_term
        proposal = Proposal(term=stale_term, index=len(stale.log), action="x",
                            proposer=0)
        assert not cast_vote(gate.peers[new_leader], proposal, True)

    def test_seeded_elections_have_one_winner_per_term(self):
        for seed in range(20):
            gate = RaftGate([0, 1, 2], seed=seed)
            gate.run_election()
            for term, holders in gate.leaders_by_term.items():
                assert len(holders) == 1, (seed, term, holders)
            assert gate.violations == []

    def test_revived_peer_rejoins_as_follower(self):
        gate = make_gate()
        gate.set_alive(2, False)
        gate.ratify("a", True)
        gate.set_alive(2, True)
        assert gate.peers[2].role == "follower"
        for _ in range(30):
            gate.tick()
        # heartbeat tail catches the follower up
        assert gate.peers[2].has_entry(gate.peers[0].log[0].term, 0)


def test_vote_uniqueness_over_chaotic_runs():
    for seed in range(10):
        gate = RaftGate([0, 1, 2, 3, 4], seed=seed,
                        profile=FaultProfile(drop_prob=0.2, delay_min=0, delay_max=3))
        gate.peers[0].role = LEADER
        rng = np.random.default_rng(seed)
        for k in range(6):
            if gate.leader_id is not None and rng.random() < 0.5:
                gate.set_alive(gate.leader_id, False)
            gate.ratify(f"a{k}", True)
            for pid in list(gate.peers):
                if not gate.peers[pid].alive and rng.random() < 0.7:
                    gate.set_alive(pid, True)
        assert not any("vote uniqueness" in v for v in gate.violations), (
            seed, gate.violations)
