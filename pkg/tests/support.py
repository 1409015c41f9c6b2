"""Independent oracles and fixture environments used across the suite."""

from __future__ import annotations

import numpy as np

from adaptswarm.env.environment import StepResult

FD_STEP = 1e-3
FD_TOL = 1e-4


def finite_difference_grads(eval_scalar, arrays, step=FD_STEP):
    """Central finite differences of eval_scalar() w.r.t. each array in place."""
    grads = []
    for arr in arrays:
        g = np.zeros_like(arr)
        flat = arr.ravel()
        gf = g.ravel()
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + step
            fp = eval_scalar()
            flat[k] = orig - step
            fm = eval_scalar()
            flat[k] = orig
            gf[k] = (fp - fm) / (2.0 * step)
        grads.append(g)
    return grads


def gradient_rel_err(analytic, numeric) -> float:
    """Worst per-array relative error by norm."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = max(float(np.linalg.norm(a)), float(np.linalg.norm(n)), 1e-8)
        worst = max(worst, float(np.linalg.norm(a - n)) / denom)
    return worst


RELU_KINK_MARGIN = 5e-3  # > max pre-activation shift a 1e-3 probe can cause here


def relu_kink_distance(tape) -> float:
    """Smallest |pre-activation| over the tape's relu layers.

    Central differences are invalid where a relu input can cross zero
    within the probe step, so instances inside the margin are resampled.
    """
    closest = np.inf
    for spec, cache in zip(tape.net.layers, tape.caches):
        if cache[0] == "dense" and getattr(spec, "activation", "") == "relu":
            closest = min(closest, float(np.min(np.abs(cache[2]))))
    return closest


# ---- 5-state deterministic chain MDP and its value-iteration oracle --------

CHAIN_STATES = 5
CHAIN_ACTIONS = 2  # 0 = left, 1 = right
CHAIN_GOAL = CHAIN_STATES - 1
CHAIN_STEP_REWARD = -1.0
CHAIN_GOAL_REWARD = 10.0


def chain_transition(s: int, a: int) -> tuple[int, float, bool]:
    s2 = max(0, min(CHAIN_GOAL, s + (1 if a == 1 else -1)))
    done = s2 == CHAIN_GOAL
    reward = CHAIN_GOAL_REWARD if done else CHAIN_STEP_REWARD
    return s2, reward, done


def chain_value_iteration(gamma: float, tol: float = 1e-14) -> np.ndarray:
    """Exact tabular Q* for the chain, iterated to the fixed point."""
    q = np.zeros((CHAIN_STATES, CHAIN_ACTIONS))
    while True:
        q_new = np.zeros_like(q)
        for s in range(CHAIN_STATES):
            for a in range(CHAIN_ACTIONS):
                s2, r, done = chain_transition(s, a)
                q_new[s, a] = r + (0.0 if done else gamma * np.max(q[s2]))
        if np.max(np.abs(q_new - q)) < tol:
            return q_new
        q = q_new


class ChainEnv:
    """One-hot observations over the chain; terminal at the right end."""

    def __init__(self, max_steps: int = 30):
        self.n_actions = CHAIN_ACTIONS
        self.observation_size = CHAIN_STATES
        self.max_steps = max_steps
        self.state = 0
        self.steps = 0

    def _obs(self) -> np.ndarray:
        v = np.zeros(CHAIN_STATES)
        v[self.state] = 1.0
        return v

    def reset(self, seed: int) -> np.ndarray:
        self.state = 0
        self.steps = 0
        return self._obs()

    def step(self, action: int) -> StepResult:
        s2, reward, terminal = chain_transition(self.state, action)
        self.state = s2
        self.steps += 1
        done = terminal or self.steps >= self.max_steps
        return StepResult(
            observation=self._obs(), reward=reward, done=done,
            info={"duration_s": 0.0, "converged": terminal},
        )


class TwoArmedBandit:
    """Single-step episodes: arm 0 pays 1, arm 1 pays 0."""

    def __init__(self):
        self.n_actions = 2
        self.observation_size = 1

    def reset(self, seed: int) -> np.ndarray:
        return np.ones(1)

    def step(self, action: int) -> StepResult:
        reward = 1.0 if action == 0 else 0.0
        return StepResult(
            observation=np.ones(1), reward=reward, done=True,
            info={"duration_s": 0.0, "converged": True},
        )
