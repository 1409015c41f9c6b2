"""Loss functions with exact gradients w.r.t. the prediction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layers import ShapeError

PROB_FLOOR = 1e-12


@dataclass
class LossResult:
    value: float
    grad: np.ndarray
    clamped: bool = False


def mse(prediction: np.ndarray, target: np.ndarray) -> LossResult:
    p = np.asarray(prediction, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ShapeError(f"mse shapes differ: {p.shape} vs {t.shape}")
    resid = p - t
    n = p.size
    return LossResult(value=float(np.mean(resid * resid)), grad=2.0 * resid / n)


def cross_entropy(prediction: np.ndarray, index: int, weight: float = 1.0) -> LossResult:
    """Weighted negative log-likelihood of one class of a probability vector.

    Probabilities at or below zero are clamped to PROB_FLOOR and flagged.
    """
    p = np.asarray(prediction, dtype=np.float64)
    if not 0 <= index < p.shape[-1]:
        raise ShapeError(f"class index {index} out of range for {p.shape}")
    pi = float(p[index])
    clamped = pi <= PROB_FLOOR
    pi = max(pi, PROB_FLOOR)
    grad = np.zeros_like(p)
    grad[index] = -weight / pi
    return LossResult(value=float(-weight * np.log(pi)), grad=grad, clamped=clamped)


def loss(kind: str, prediction: np.ndarray, target) -> LossResult:
    """Dispatch by kind: 'mse' takes a target vector, 'cross_entropy' an
    (action index, weight) pair."""
    if kind == "mse":
        return mse(prediction, target)
    if kind == "cross_entropy":
        index, weight = target
        return cross_entropy(prediction, int(index), float(weight))
    raise ValueError(f"unknown loss kind {kind!r}")
