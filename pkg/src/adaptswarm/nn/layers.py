"""Layer parameter containers, activations, and the single-sample ops."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = ("linear", "relu", "tanh", "sigmoid", "softmax")


class ShapeError(ValueError):
    """Operand dimensions do not line up."""


class PreconditionError(ValueError):
    """An operation was called outside its contract."""


@dataclass
class DenseParams:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)

    def arrays(self) -> list[np.ndarray]:
        return [self.weights, self.bias]


@dataclass
class GruParams:
    wz: np.ndarray  # update gate, (H, in)
    uz: np.ndarray  # (H, H)
    bz: np.ndarray  # (H,)
    wr: np.ndarray  # reset gate
    ur: np.ndarray
    br: np.ndarray
    wh: np.ndarray  # candidate
    uh: np.ndarray
    bh: np.ndarray

    @property
    def hidden(self) -> int:
        return self.wz.shape[0]

    @property
    def input_dim(self) -> int:
        return self.wz.shape[1]

    def arrays(self) -> list[np.ndarray]:
        return [self.wz, self.uz, self.bz, self.wr, self.ur, self.br,
                self.wh, self.uh, self.bh]


def _uniform_limit(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_dense(units: int, input_dim: int, rng: np.random.Generator) -> DenseParams:
    lim = _uniform_limit(input_dim, units)
    w = rng.uniform(-lim, lim, size=(units, input_dim))
    return DenseParams(weights=w, bias=np.zeros(units))


def init_gru(hidden: int, input_dim: int, rng: np.random.Generator) -> GruParams:
    lw = _uniform_limit(input_dim, hidden)
    lu = _uniform_limit(hidden, hidden)

    def w():
        return rng.uniform(-lw, lw, size=(hidden, input_dim))

    def u():
        return rng.uniform(-lu, lu, size=(hidden, hidden))

    return GruParams(
        wz=w(), uz=u(), bz=np.zeros(hidden),
        wr=w(), ur=u(), br=np.zeros(hidden),
        wh=w(), uh=u(), bh=np.zeros(hidden),
    )


def sigmoid(x: np.ndarray) -> np.ndarray:
    # clamp keeps exp finite for any finite input
    x = np.minimum(np.maximum(x, -60.0), 60.0)
    return 1.0 / (1.0 + np.exp(-x))


def softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - np.max(x, axis=-1, keepdims=True))
    return e / np.sum(e, axis=-1, keepdims=True)


def activate(kind: str, x: np.ndarray) -> np.ndarray:
    """Apply an elementwise activation (softmax normalises the last axis)."""
    if kind == "linear":
        return np.asarray(x, dtype=np.float64)
    if kind == "relu":
        return np.maximum(x, 0.0)
    if kind == "tanh":
        return np.tanh(x)
    if kind == "sigmoid":
        return sigmoid(np.asarray(x, dtype=np.float64))
    if kind == "softmax":
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] < 1:
            raise PreconditionError("softmax needs at least one component")
        return softmax(x)
    raise ValueError(f"unknown activation {kind!r}")


def activation_grad(kind: str, z: np.ndarray, y: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. pre-activation z given post-activation y and dL/dy."""
    if kind == "linear":
        return dy
    if kind == "relu":
        return dy * (z > 0.0)
    if kind == "tanh":
        return dy * (1.0 - y * y)
    if kind == "sigmoid":
        return dy * y * (1.0 - y)
    if kind == "softmax":
        s = np.sum(y * dy, axis=-1, keepdims=True)
        return y * (dy - s)
    raise ValueError(f"unknown activation {kind!r}")


def dense_forward(p: DenseParams, x: np.ndarray) -> np.ndarray:
    """Affine map y = W x + b; the caller applies any activation."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p.weights.shape[1],):
        raise ShapeError(
            f"dense input shape {x.shape} does not match weights "
            f"{p.weights.shape}"
        )
    return p.weights @ x + p.bias


def gru_step(p: GruParams, x_t: np.ndarray, h_prev: np.ndarray) -> np.ndarray:
    """One GRU update: h = (1-z)*h_prev + z*candidate."""
    x_t = np.asarray(x_t, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    if x_t.shape != (p.input_dim,):
        raise ShapeError(f"gru input shape {x_t.shape} vs expected ({p.input_dim},)")
    if h_prev.shape != (p.hidden,):
        raise ShapeError(f"gru hidden shape {h_prev.shape} vs expected ({p.hidden},)")
    z = sigmoid(p.wz @ x_t + p.uz @ h_prev + p.bz)
    r = sigmoid(p.wr @ x_t + p.ur @ h_prev + p.br)
    c = np.tanh(p.wh @ x_t + p.uh @ (r * h_prev) + p.bh)
    return (1.0 - z) * h_prev + z * c


def gru_sequence_forward(p: GruParams, seq, h0: np.ndarray) -> np.ndarray:
    """Run gru_step over the sequence and return only the final hidden state."""
    steps = list(seq)
    if not steps:
        raise PreconditionError("gru sequence must be nonempty")
    h = np.asarray(h0, dtype=np.float64)
    for x_t in steps:
        h = gru_step(p, x_t, h)
    return h
