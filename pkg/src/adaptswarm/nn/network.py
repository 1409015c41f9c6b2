"""Network assembly, batched forward with tape, and reverse-mode backprop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .layers import (
    ACTIVATIONS,
    DenseParams,
    GruParams,
    PreconditionError,
    ShapeError,
    activate,
    activation_grad,
    init_dense,
    init_gru,
)


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class Dense:
    units: int
    activation: str = "linear"


@dataclass(frozen=True)
class Gru:
    hidden: int


class StaleTapeError(PreconditionError):
    """The tape no longer matches the network's parameters."""


def _ct(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a.T)


class Network:
    """Ordered layer stack with materialised float64 parameters.

    At most one Gru layer is allowed and it must come before any Dense
    layer; a recurrent network consumes (T, input_dim) sequences, a plain
    one consumes (input_dim,) vectors.
    """

    def __init__(self, input_dim: int, layers, seed: int | None = 0,
                 rng: np.random.Generator | None = None):
        if rng is None:
            rng = np.random.default_rng(seed)
        self.input_dim = int(input_dim)
        self.layers = list(layers)
        self.params: list[DenseParams | GruParams | None] = []
        self.version = 0
        self._validate_and_build(rng)

    def _validate_and_build(self, rng: np.random.Generator) -> None:
        width = self.input_dim
        seen_gru = False
        seen_dense = False
        for spec in self.layers:
            if isinstance(spec, Flatten):
                self.params.append(None)
            elif isinstance(spec, Gru):
                if seen_gru:
                    raise ValueError("at most one gru layer is supported")
                if seen_dense:
                    raise ValueError("gru layer must come before dense layers")
                seen_gru = True
                self.params.append(init_gru(spec.hidden, width, rng))
                width = spec.hidden
            elif isinstance(spec, Dense):
                if spec.activation not in ACTIVATIONS:
                    raise ValueError(f"unknown activation {spec.activation!r}")
                seen_dense = True
                self.params.append(init_dense(spec.units, width, rng))
                width = spec.units
            else:
                raise TypeError(f"unknown layer spec {spec!r}")
        self.output_dim = width

    @property
    def recurrent(self) -> bool:
        return any(isinstance(s, Gru) for s in self.layers)

    def parameter_arrays(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for p in self.params:
            if p is not None:
                out.extend(p.arrays())
        return out

    def copy(self) -> "Network":
        clone = Network.__new__(Network)
        clone.input_dim = self.input_dim
        clone.layers = list(self.layers)
        clone.output_dim = self.output_dim
        clone.version = 0
        clone.params = []
        for p in self.params:
            if p is None:
                clone.params.append(None)
            elif isinstance(p, DenseParams):
                clone.params.append(DenseParams(p.weights.copy(), p.bias.copy()))
            else:
                clone.params.append(GruParams(*[a.copy() for a in p.arrays()]))
        return clone

    def copy_from(self, other: "Network") -> None:
        """Hard-copy parameter values from a same-shaped network."""
        for mine, theirs in zip(self.parameter_arrays(), other.parameter_arrays()):
            if mine.shape != theirs.shape:
                raise ShapeError(f"parameter shape {theirs.shape} vs {mine.shape}")
            mine[...] = theirs
        self.version += 1

    def apply_gradients(self, opt_state, grads: list[np.ndarray]) -> None:
        from .optim import optimizer_step

        optimizer_step(opt_state, self.parameter_arrays(), grads)
        self.version += 1


@dataclass
class Tape:
    net: Network
    version: int
    caches: list
    single: bool
    output: np.ndarray


def network_forward_batch(net: Network, x: np.ndarray,
                          mask: np.ndarray | None = None) -> tuple[np.ndarray, Tape]:
    """Forward a batch; returns (B, output_dim) plus the backprop tape.

    Recurrent nets take x of shape (B, T, input_dim) with an optional
    (B, T) mask whose zero entries are left-padding.
    """
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if net.recurrent:
        if x.ndim != 3:
            raise ShapeError(f"recurrent input must be (B,T,D), got {x.shape}")
        if mask is None:
            mask = np.ones(x.shape[:2])
        mask = np.ascontiguousarray(np.asarray(mask, dtype=np.float64))
    elif x.ndim != 2:
        raise ShapeError(f"input must be (B,D), got {x.shape}")

    cur = x
    caches: list = []
    for spec, p in zip(net.layers, net.params):
        if isinstance(spec, Flatten):
            shape = cur.shape
            if cur.ndim > 3 or (cur.ndim == 3 and not net.recurrent):
                cur = cur.reshape(shape[0], -1)
            caches.append(("flatten", shape))
        elif isinstance(spec, Gru):
            hs, zs, rs, cs = kernels.gru_forward(
                cur, mask,
                _ct(p.wz), _ct(p.uz), p.bz,
                _ct(p.wr), _ct(p.ur), p.br,
                _ct(p.wh), _ct(p.uh), p.bh,
                np.zeros((cur.shape[0], p.hidden)),
            )
            caches.append(("gru", cur, mask, hs, zs, rs, cs))
            cur = np.ascontiguousarray(hs[:, -1, :])
        else:
            if cur.shape[1] != p.weights.shape[1]:
                raise ShapeError(
                    f"dense input width {cur.shape[1]} does not match weights "
                    f"{p.weights.shape}"
                )
            z = kernels.dense_forward(cur, _ct(p.weights), p.bias)
            y = activate(spec.activation, z)
            caches.append(("dense", cur, z, y))
            cur = np.ascontiguousarray(y)
    return cur, Tape(net=net, version=net.version, caches=caches, single=False,
                     output=cur)


def network_forward(net: Network, x) -> tuple[np.ndarray, Tape]:
    """Single-sample forward: vector in (or (T, D) sequence for recurrent nets)."""
    x = np.asarray(x, dtype=np.float64)
    if net.recurrent:
        if x.ndim == 1:
            raise ShapeError("recurrent network expects a (T, D) sequence")
        batch = x[None, :, :]
    else:
        if x.shape != (net.input_dim,):
            raise ShapeError(f"input shape {x.shape} vs expected ({net.input_dim},)")
        batch = x[None, :]
    y, tape = network_forward_batch(net, batch)
    tape.single = True
    return y[0], tape


def backprop(net: Network, tape: Tape, output_gradient: np.ndarray
             ) -> tuple[list[np.ndarray], np.ndarray]:
    """Exact reverse-mode gradients for every parameter, plus d(input).

    The gradient list lines up with net.parameter_arrays().
    """
    if tape.net is not net or tape.version != net.version:
        raise StaleTapeError("tape does not match the network's current parameters")
    d = np.asarray(output_gradient, dtype=np.float64)
    if tape.single:
        d = d[None, :]
    d = np.ascontiguousarray(d)

    grads_rev: list[np.ndarray] = []
    for spec, p, cache in zip(reversed(net.layers), reversed(net.params),
                              reversed(tape.caches)):
        if cache[0] == "flatten":
            d = d.reshape(cache[1])
        elif cache[0] == "dense":
            _, x_in, z, y = cache
            dz = np.ascontiguousarray(activation_grad(spec.activation, z, y, d))
            dw, db, d = kernels.dense_backward(x_in, p.weights, dz)
            grads_rev.extend([db, dw])
        else:
            _, x_in, mask, hs, zs, rs, cs = cache
            out = kernels.gru_backward(
                x_in, mask, p.wz, p.uz, p.wr, p.ur, p.wh, p.uh,
                hs, zs, rs, cs, d,
            )
            dwz, duz, dbz, dwr, dur, dbr, dwh, duh, dbh, dx, _ = out
            grads_rev.extend([dbh, duh, dwh, dbr, dur, dwr, dbz, duz, dwz])
            d = dx
    grads = list(reversed(grads_rev))
    if tape.single:
        d = d[0]
    return grads, d
