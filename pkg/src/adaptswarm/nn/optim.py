"""SGD and bias-corrected Adam over flat parameter lists, plus soft updates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .layers import PreconditionError, ShapeError


@dataclass
class OptimizerState:
    algorithm: str = "adam"
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def adam(cls, params: list[np.ndarray], lr: float = 1e-3, beta1: float = 0.9,
             beta2: float = 0.999, eps: float = 1e-8) -> "OptimizerState":
        return cls(
            algorithm="adam", lr=lr, beta1=beta1, beta2=beta2, eps=eps,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )

    @classmethod
    def sgd(cls, lr: float) -> "OptimizerState":
        return cls(algorithm="sgd", lr=lr)


def optimizer_step(state: OptimizerState, params: list[np.ndarray],
                   grads: list[np.ndarray]) -> list[np.ndarray]:
    """Update params in place from grads; shapes must mirror exactly."""
    if len(params) != len(grads):
        raise ShapeError(f"{len(grads)} gradients for {len(params)} parameters")
    for p, g in zip(params, grads):
        if p.shape != g.shape:
            raise ShapeError(f"gradient shape {g.shape} vs parameter {p.shape}")
    if state.algorithm == "sgd":
        for p, g in zip(params, grads):
            kernels.sgd_update(p.ravel(), np.ascontiguousarray(g).ravel(), state.lr)
        state.step += 1
        return params
    if state.algorithm == "adam":
        if len(state.m) != len(params):
            raise PreconditionError("adam moments were built for a different net")
        state.step += 1
        for p, g, m, v in zip(params, grads, state.m, state.v):
            kernels.adam_update(
                p.ravel(), np.ascontiguousarray(g).ravel(), m.ravel(), v.ravel(),
                state.step, state.lr, state.beta1, state.beta2, state.eps,
            )
        return params
    raise ValueError(f"unknown optimizer {state.algorithm!r}")


def soft_update(target_params: list[np.ndarray], online_params: list[np.ndarray],
                tau: float) -> list[np.ndarray]:
    """Blend target toward online: t <- (1-tau)*t + tau*o, elementwise."""
    if not 0.0 <= tau <= 1.0:
        raise PreconditionError(f"tau must lie in [0,1], got {tau}")
    if len(target_params) != len(online_params):
        raise ShapeError("parameter lists differ in length")
    for t, o in zip(target_params, online_params):
        if t.shape != o.shape:
            raise ShapeError(f"shape {o.shape} vs {t.shape}")
        t[...] = (1.0 - tau) * t + tau * o
    return target_params
