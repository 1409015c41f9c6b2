"""Episode driver and the per-episode metrics record."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .replay import Transition


@dataclass
class TrainStats:
    loss: float = 0.0
    mean_q: float = 0.0
    mae: float = 0.0


@dataclass
class EpisodeMetrics:
    episode: int
    steps: int
    total_reward: float
    mean_q: float
    mae: float
    loss: float
    adaptation_time_s: float
    converged: bool


def run_episode(agent, env, seed: int, episode: int
                ) -> tuple[EpisodeMetrics, list[Transition]]:
    """One select/step/store/train loop until the episode ends.

    mean_q averages the agent's own score of each selected action (Q for the
    value learners, log-probability for pgnn, the critic estimate for ddpg);
    mae and loss average over the episode's training updates (zero when the
    episode trained nothing).
    """
    obs = env.reset(seed)
    agent.begin_episode()
    transitions: list[Transition] = []
    total_reward = 0.0
    q_sum = 0.0
    adaptation_time = 0.0
    losses: list[float] = []
    maes: list[float] = []
    converged = False
    done = False
    steps = 0
    while not done:
        action, q_pred = agent.select_action(obs)
        result = env.step(action)
        tr = Transition(s=obs, a=action, r=result.reward,
                        s2=result.observation, done=result.done)
        transitions.append(tr)
        agent.observe(tr)
        stats = agent.train_step()
        if stats is not None:
            losses.append(stats.loss)
            maes.append(stats.mae)
        total_reward += result.reward
        q_sum += q_pred
        adaptation_time += float(result.info.get("duration_s", 0.0))
        converged = bool(result.info.get("converged", False))
        obs = result.observation
        done = result.done
        steps += 1
    stats = agent.end_episode()
    if stats is not None:
        losses.append(stats.loss)
        maes.append(stats.mae)
    metrics = EpisodeMetrics(
        episode=episode,
        steps=steps,
        total_reward=float(total_reward),
        mean_q=float(q_sum / steps),
        mae=float(np.mean(maes)) if maes else 0.0,
        loss=float(np.mean(losses)) if losses else 0.0,
        adaptation_time_s=float(adaptation_time),
        converged=converged,
    )
    return metrics, transitions
