"""Minimal neural-network engine: forward, manual backprop (with BPTT),
losses, optimizers, and binary snapshots."""

from .kernels import USING_NUMBA, warmup
from .layers import (
    ACTIVATIONS,
    DenseParams,
    GruParams,
    PreconditionError,
    ShapeError,
    activate,
    dense_forward,
    gru_sequence_forward,
    gru_step,
    init_dense,
    init_gru,
    sigmoid,
    softmax,
)
from .losses import LossResult, cross_entropy, loss, mse
from .network import (
    Dense,
    Flatten,
    Gru,
    Network,
    StaleTapeError,
    Tape,
    backprop,
    network_forward,
    network_forward_batch,
)
from .optim import OptimizerState, optimizer_step, soft_update
from .serialize import ParseError, VersionError, load_params, save_params

__all__ = [
    "ACTIVATIONS", "DenseParams", "GruParams", "PreconditionError", "ShapeError",
    "activate", "dense_forward", "gru_sequence_forward", "gru_step",
    "init_dense", "init_gru", "sigmoid", "softmax",
    "LossResult", "cross_entropy", "loss", "mse",
    "Dense", "Flatten", "Gru", "Network", "StaleTapeError", "Tape",
    "backprop", "network_forward", "network_forward_batch",
    "OptimizerState", "optimizer_step", "soft_update",
    "ParseError", "VersionError", "load_params", "save_params",
    "USING_NUMBA", "warmup",
]
