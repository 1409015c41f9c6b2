"""Synthetic per-service demand: sinusoid plus noise plus rare spikes."""

from __future__ import annotations

import math

import numpy as np

from .config import WorkloadSpec


def demand(model: WorkloadSpec, t: int, rng: np.random.Generator) -> float:
    """Demand in millicores at tick t, clamped at zero.

    A spike adds (spike_mult - 1) * base on top of the sinusoid.  The noise
    and spike draws are always consumed so the stream stays aligned across
    configurations.
    """
    if t < 0:
        raise ValueError("tick must be nonnegative")
    level = model.base
    if model.period > 0:
        level += model.amplitude * math.sin(2.0 * math.pi * t / model.period)
    level += rng.normal(0.0, model.noise_sigma) if model.noise_sigma > 0 else rng.normal(0.0, 0.0)
    if rng.random() < model.spike_prob:
        level += (model.spike_mult - 1.0) * model.base
    return max(0.0, float(level))
