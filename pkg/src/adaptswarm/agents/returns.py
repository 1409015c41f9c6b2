"""Target and return computations shared across the planners."""

from __future__ import annotations

import numpy as np

from ..nn.layers import PreconditionError

STD_FLOOR = 1e-8


def bellman_targets(rewards: np.ndarray, dones: np.ndarray,
                    next_q_values: np.ndarray, gamma: float) -> np.ndarray:
    """y_i = r_i + gamma * max_a Q_target(s'_i, a) * (1 - done_i).

    next_q_values is the target network's (B, n_actions) output for s'.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size == 0:
        raise PreconditionError("bellman targets need a nonempty batch")
    dones = np.asarray(dones, dtype=np.float64)
    best = np.max(np.asarray(next_q_values, dtype=np.float64), axis=1)
    return rewards + gamma * best * (1.0 - dones)


def dueling_aggregate(v: float, adv: np.ndarray, mode: str = "mean_centered") -> np.ndarray:
    """Combine a state value and per-action advantages into Q values."""
    adv = np.asarray(adv, dtype=np.float64)
    if mode == "paper_literal":
        return v + adv
    if mode == "mean_centered":
        return v + adv - np.mean(adv)
    raise ValueError(f"unknown dueling mode {mode!r}")


def dueling_aggregate_batch(v: np.ndarray, adv: np.ndarray, mode: str) -> np.ndarray:
    if mode == "paper_literal":
        return v[:, None] + adv
    if mode == "mean_centered":
        return v[:, None] + adv - np.mean(adv, axis=1, keepdims=True)
    raise ValueError(f"unknown dueling mode {mode!r}")


def discounted_returns(rewards, gamma: float) -> list[float]:
    """G_t = sum_{k>=t} gamma^(k-t) r_k, computed by the backward recurrence."""
    rewards = list(rewards)
    if not rewards:
        raise PreconditionError("discounted returns need a nonempty reward list")
    out = [0.0] * len(rewards)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def normalize_returns(returns) -> np.ndarray:
    """Standardise returns across the whole batch (population std, floored)."""
    g = np.asarray(list(returns), dtype=np.float64)
    if g.size < 2:
        raise PreconditionError("normalisation needs at least two steps")
    std = float(np.std(g))
    return (g - np.mean(g)) / max(std, STD_FLOOR)
