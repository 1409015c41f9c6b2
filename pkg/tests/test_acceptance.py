"""Acceptance suite: one test per criterion, one pass/fail line each.

Run as `pytest tests/test_acceptance.py -v -s` to see the lines live.
"""

import time

import numpy as np
import pytest

from adaptswarm.agents import (
    AgentConfig,
    DDPGAgent,
    DDQNAgent,
    OUProcess,
    bellman_targets,
    make_agent,
    ou_step,
    run_episode,
)
from adaptswarm.harness import (
    CSV_HEADER,
    aggregate,
    build_config,
    compare_report,
    emit_plots,
    run_experiment,
    scan_output_dir,
)
from adaptswarm.nn import (
    Dense,
    Flatten,
    Gru,
    Network,
    backprop,
    cross_entropy,
    mse,
    network_forward,
    network_forward_batch,
)
from adaptswarm.raft import FaultProfile, LEADER, RaftGate

from support import (
    CHAIN_STATES,
    ChainEnv,
    FD_TOL,
    RELU_KINK_MARGIN,
    TwoArmedBandit,
    chain_transition,
    chain_value_iteration,
    finite_difference_grads,
    gradient_rel_err,
    relu_kink_distance,
)

ALGOS = ("dqn", "ddqn", "drqn", "pgnn", "ddpg")


def report(criterion: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} [{detail}]")


# --------------------------------------------------------------------------
# 1. Gradient suite


def _fd_check_simple_net(layers, input_shape, loss_kind, seed):
    rng = np.random.default_rng(seed)
    net = Network(input_shape[-1], layers, seed=seed)
    x = rng.normal(size=input_shape)
    if loss_kind == "mse":
        target = rng.normal(size=net.output_dim)

        def value():
            y, _ = network_forward(net, x)
            return mse(y, target).value

        y, tape = network_forward(net, x)
        grad = mse(y, target).grad
    else:
        idx = int(rng.integers(net.output_dim))

        def value():
            y, _ = network_forward(net, x)
            return cross_entropy(y, idx, 1.0).value

        y, tape = network_forward(net, x)
        grad = cross_entropy(y, idx, 1.0).grad
    if relu_kink_distance(tape) < RELU_KINK_MARGIN:
        return None
    analytic, _ = backprop(net, tape, grad)
    fd = finite_difference_grads(value, net.parameter_arrays())
    return gradient_rel_err(analytic, fd)


def _fd_check_dueling(seed):
    rng = np.random.default_rng(seed)
    agent = DDQNAgent(5, 4, AgentConfig(hidden_units=6), seed=seed)
    net = agent.online
    x = rng.normal(size=(1, 5))
    target = rng.normal(size=4)

    def value():
        q, _ = net.forward_batch(x)
        return float(np.mean((q[0] - target) ** 2))

    q, tapes = net.forward_batch(x)
    if relu_kink_distance(tapes[0]) < RELU_KINK_MARGIN:
        return None
    dq = (2.0 * (q - target[None, :]) / 4.0)
    analytic = net.backward(tapes, dq)
    fd = finite_difference_grads(value, net.parameter_arrays())
    return gradient_rel_err(analytic, fd)


def _fd_check_actor_through_critic(seed):
    rng = np.random.default_rng(seed)
    agent = DDPGAgent(5, 4, AgentConfig(hidden_units=6), seed=seed)
    s = rng.normal(size=(1, 5))

    def value():
        a, _ = network_forward_batch(agent.actor, s)
        q, _ = network_forward_batch(agent.critic, np.hstack([s, a]))
        return float(np.mean(q[:, 0]))

    a, atape = network_forward_batch(agent.actor, s)
    q, ctape = network_forward_batch(agent.critic, np.hstack([s, a]))
    if min(relu_kink_distance(atape), relu_kink_distance(ctape)) < RELU_KINK_MARGIN:
        return None
    dq = np.full((1, 1), 1.0)
    _, dx = backprop(agent.critic, ctape, dq)
    analytic, _ = backprop(agent.actor, atape, dx[:, 5:])
    fd = finite_difference_grads(value, agent.actor.parameter_arrays())
    return gradient_rel_err(analytic, fd)


def _valid_instance(check, seed):
    """Resample until the instance is safely differentiable at the probe."""
    for offset in range(0, 500_000, 10_000):
        err = check(seed + offset)
        if err is not None:
            return err
    raise AssertionError(f"no kink-free instance found from seed {seed}")


def test_criterion_1_gradient_suite():
    t0 = time.time()
    worst = 0.0
    for seed in range(20):
        for i, act in enumerate(("relu", "tanh", "sigmoid", "linear")):
            worst = max(worst, _valid_instance(
                lambda s, a=act: _fd_check_simple_net(
                    [Flatten(), Dense(6, a), Dense(3, "linear")], (5,), "mse", s),
                seed * 7 + i * 111))
        worst = max(worst, _valid_instance(
            lambda s: _fd_check_simple_net(
                [Flatten(), Gru(4), Dense(5, "relu"), Dense(3, "linear")],
                (3, 5), "mse", s),
            seed + 500))
        worst = max(worst, _valid_instance(
            lambda s: _fd_check_simple_net(
                [Flatten(), Dense(6, "relu"), Dense(3, "softmax")], (5,),
                "cross_entropy", s),
            seed + 900))
        worst = max(worst, _valid_instance(_fd_check_dueling, seed + 1300))
        worst = max(worst, _valid_instance(_fd_check_actor_through_critic,
                                           seed + 1700))
    elapsed = time.time() - t0
    passed = worst < FD_TOL and elapsed < 30.0
    report("1 gradient-suite", passed,
           f"worst rel err {worst:.2e} (tol {FD_TOL}), {elapsed:.1f}s")
    assert worst < FD_TOL
    assert elapsed < 30.0


# --------------------------------------------------------------------------
# 2. Tabular oracle


def test_criterion_2_tabular_oracle():
    t0 = time.time()
    gamma = 0.9
    q_star = chain_value_iteration(gamma)
    rewards, dones, next_q, expected = [], [], [], []
    for s in range(CHAIN_STATES):
        for a in range(2):
            s2, r, done = chain_transition(s, a)
            rewards.append(r)
            dones.append(float(done))
            next_q.append(q_star[s2])
            expected.append(q_star[s, a])
    y = bellman_targets(np.array(rewards), np.array(dones),
                        np.array(next_q), gamma)
    target_gap = float(np.max(np.abs(y - np.array(expected))))

    def greedy_is_optimal(agent) -> bool:
        for s in range(CHAIN_STATES - 1):
            obs = np.zeros(CHAIN_STATES)
            obs[s] = 1.0
            q, _ = network_forward(agent.online, obs)
            if int(np.argmax(q)) != 1:
                return False
        return True

    wins = 0
    for seed in range(10):
        env = ChainEnv()
        cfg = AgentConfig(gamma=gamma, batch_size=16, buffer_capacity=2000,
                          epsilon_decay_steps=400, target_update_every=100)
        agent = make_agent("dqn", env.observation_size, env.n_actions, cfg,
                           seed=seed)
        for ep in range(1, 501):
            run_episode(agent, env, seed=ep, episode=ep)
            if ep % 20 == 0 and greedy_is_optimal(agent):
                wins += 1
                break
    elapsed = time.time() - t0
    passed = target_gap <= 1e-9 and wins >= 9 and elapsed < 60.0
    report("2 tabular-oracle", passed,
           f"bellman gap {target_gap:.1e}, optimal policy {wins}/10 seeds, "
           f"{elapsed:.1f}s")
    assert target_gap <= 1e-9
    assert wins >= 9
    assert elapsed < 60.0


# --------------------------------------------------------------------------
# 3. Raft safety fuzz


def _fuzz_run(seed: int, n: int) -> list[str]:
    rng = np.random.default_rng(seed)
    profile = FaultProfile(
        drop_prob=float(rng.uniform(0.0, 0.3)),
        delay_min=0,
        delay_max=int(rng.integers(0, 4)),
    )
    gate = RaftGate(list(range(n)), seed=seed, profile=profile)
    gate.peers[0].role = LEADER
    gate.leaders_by_term.setdefault(0, set()).add(0)
    for k in range(8):
        leader = gate.leader_id
        if leader is not None and rng.random() < 0.35:
            gate.set_alive(leader, False)  # scheduled leader crash
        for pid in list(gate.peers):
            if not gate.peers[pid].alive and rng.random() < 0.5:
                gate.set_alive(pid, True)
        gate.ratify(f"action-{k}", bool(rng.random() < 0.9))
        for _ in range(int(rng.integers(0, 8))):
            gate.tick()
    return gate.violations


def test_criterion_3_raft_safety_fuzz():
    t0 = time.time()
    violations = []
    for i in range(1000):
        n = 3 if i % 2 == 0 else 5
        v = _fuzz_run(i, n)
        if v:
            violations.append((i, n, v))
    elapsed = time.time() - t0
    passed = not violations and elapsed < 60.0
    report("3 raft-safety-fuzz", passed,
           f"{len(violations)} violating runs of 1000, {elapsed:.1f}s")
    assert violations == []
    assert elapsed < 60.0


# --------------------------------------------------------------------------
# 4. Determinism


def test_criterion_4_determinism(tmp_path):
    mismatches = []
    for algo in ALGOS:
        blobs = []
        for tag in ("a", "b"):
            cfg = build_config(algorithm=algo, episodes=50, seeds=[42],
                               out_dir=str(tmp_path / tag))
            exp_dir = run_experiment(cfg)
            blobs.append((exp_dir / "seed42.csv").read_bytes())
        if blobs[0] != blobs[1]:
            mismatches.append(algo)
    passed = not mismatches
    report("4 determinism", passed,
           f"byte-identical 50-episode CSVs for {len(ALGOS) - len(mismatches)}"
           f"/{len(ALGOS)} algorithms")
    assert mismatches == []


# --------------------------------------------------------------------------
# 5. PGNN bandit


def test_criterion_5_pgnn_bandit():
    t0 = time.time()
    wins = 0
    probs = []
    for seed in range(10):
        env = TwoArmedBandit()
        cfg = AgentConfig(lr=0.1, pgnn_batch_episodes=10)
        agent = make_agent("pgnn", env.observation_size, env.n_actions, cfg,
                           seed=seed)
        for ep in range(1, 301):
            run_episode(agent, env, seed=ep, episode=ep)
        p0 = float(agent.action_probabilities(np.ones(1))[0])
        probs.append(p0)
        wins += p0 > 0.9
    elapsed = time.time() - t0
    passed = wins >= 8 and elapsed < 30.0
    report("5 pgnn-bandit", passed,
           f"pi(best)>0.9 for {wins}/10 seeds (min {min(probs):.3f}), "
           f"{elapsed:.1f}s")
    assert wins >= 8
    assert elapsed < 30.0


# --------------------------------------------------------------------------
# 6. OU statistics


def test_criterion_6_ou_statistics():
    theta, sigma, dt, mu = 0.15, 0.2, 1.0, 1.0
    width = 16
    proc = OUProcess(size=width, theta=theta, mu=mu, sigma=sigma, dt=dt)
    rng = np.random.default_rng(2024)
    steps = 1_000_000 // width
    samples = np.empty((steps, width))
    for k in range(steps):
        samples[k] = ou_step(proc, rng)
    x = samples.ravel()
    a = 1.0 - theta * dt
    var_closed = sigma * sigma * dt / (1.0 - a * a)
    mean_err = abs(float(x.mean()) - mu) / abs(mu)
    var_err = abs(float(x.var()) - var_closed) / var_closed
    passed = mean_err < 0.01 and var_err < 0.05
    report("6 ou-statistics", passed,
           f"mean rel err {mean_err:.4%} (<1%), var rel err {var_err:.4%} (<5%) "
           f"over {x.size} steps")
    assert mean_err < 0.01
    assert var_err < 0.05


# --------------------------------------------------------------------------
# 7. Learning smoke test


def test_criterion_7_learning_smoke():
    from adaptswarm.env import AdaptationEnv
    from adaptswarm.harness.runner import episode_seeds

    gated = {"dqn", "ddqn", "drqn"}
    failures = []
    lines = []
    for algo in ALGOS:
        env = AdaptationEnv()
        agent = make_agent(algo, env.observation_size, env.n_actions,
                           AgentConfig(), seed=42)
        seeds = episode_seeds(42, 200)
        t0 = time.time()
        rewards = []
        for ep in range(1, 201):
            metrics, _ = run_episode(agent, env, seeds[ep - 1], ep)
            rewards.append(metrics.total_reward)
        elapsed = time.time() - t0
        first = float(np.mean(rewards[:50]))
        last = float(np.mean(rewards[150:200]))
        lines.append(f"{algo} {first:.0f}->{last:.0f} in {elapsed:.0f}s")
        if elapsed >= 600.0:
            failures.append(f"{algo} took {elapsed:.0f}s")
        if algo in gated and not last > first:
            failures.append(f"{algo} did not improve ({first:.1f} -> {last:.1f})")
    passed = not failures
    report("7 learning-smoke", passed, "; ".join(lines + failures))
    assert failures == []


# --------------------------------------------------------------------------
# 8 + 9. Comparative report and CSV/plot contract


@pytest.fixture(scope="module")
def comparison_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("comparison")
    seeds = [101, 202, 303, 404, 505]
    for algo in ALGOS:
        cfg = build_config(algorithm=algo, episodes=300, seeds=seeds,
                           out_dir=str(out))
        run_experiment(cfg)
    return out


def test_criterion_8_comparative_report(comparison_dir):
    csvs = scan_output_dir(comparison_dir)
    summaries = aggregate(csvs)
    text = compare_report(summaries)
    assert all(algo in text for algo in ALGOS)
    ranked_rewards = sorted(ALGOS, key=lambda a: -summaries[a].final_means["total_reward"])
    best = ranked_rewards[0]
    drqn_rank = ranked_rewards.index("drqn") + 1
    # reported, not gated: the simulated cluster is not the original testbed
    report("8 comparative-report", True,
           f"5 seeds x 300 episodes; best total_reward {best}; "
           f"drqn rank {drqn_rank}/5 (observation only)")
    (comparison_dir / "report.txt").write_text(text)


def test_criterion_9_csv_plot_contract(comparison_dir):
    csvs = scan_output_dir(comparison_dir)
    issues = []
    for algo, paths in csvs.items():
        for p in paths:
            header = p.read_text().splitlines()[0]
            if header != CSV_HEADER:
                issues.append(f"{p} header {header!r}")
    summaries1 = aggregate(csvs)
    written, warnings = emit_plots(summaries1, comparison_dir)
    if len(written) != 5:
        issues.append(f"{len(written)} plots written, expected 5")
    if warnings:
        issues.append(f"warnings: {warnings}")
    # identical CSVs reproduce identical aggregates and identical plots
    summaries2 = aggregate(csvs)
    for algo in summaries1:
        for metric, curve in summaries1[algo].curves.items():
            if not np.array_equal(curve, summaries2[algo].curves[metric]):
                issues.append(f"aggregate unstable for {algo}/{metric}")
    second = emit_plots(summaries2, comparison_dir / "again")[0]
    for p1, p2 in zip(written, second):
        if p1.read_bytes() != p2.read_bytes():
            issues.append(f"plot bytes differ: {p1.name}")
    passed = not issues
    report("9 csv-plot-contract", passed,
           f"schema exact, {len(written)} plots, aggregates reproducible"
           + ("" if passed else f"; issues: {issues}"))
    assert issues == []
