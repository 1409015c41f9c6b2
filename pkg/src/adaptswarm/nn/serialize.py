"""Binary network snapshots.

Layout: magic b"ADRL", one format-version byte, u32 input_dim, u32 layer
count, then one length-prefixed record per layer (u32 length, u8 kind tag,
shape fields, little-endian float64 data).  Round-trips are bit-exact.
"""

from __future__ import annotations

import struct

import numpy as np

from .layers import DenseParams, GruParams, ACTIVATIONS
from .network import Dense, Flatten, Gru, Network

MAGIC = b"ADRL"
FORMAT_VERSION = 1

_KIND_FLATTEN = 0
_KIND_DENSE = 1
_KIND_GRU = 2


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class VersionError(ParseError):
    pass


def _f64(a: np.ndarray) -> bytes:
    return np.ascontiguousarray(a, dtype="<f8").tobytes()


def save_params(net: Network) -> bytes:
    """Serialise a network's layout and parameters to bytes."""
    out = bytearray()
    out += MAGIC
    out += struct.pack("<B", FORMAT_VERSION)
    out += struct.pack("<II", net.input_dim, len(net.layers))
    for spec, p in zip(net.layers, net.params):
        if isinstance(spec, Flatten):
            payload = struct.pack("<B", _KIND_FLATTEN)
        elif isinstance(spec, Dense):
            payload = struct.pack(
                "<BBII", _KIND_DENSE, ACTIVATIONS.index(spec.activation),
                spec.units, p.weights.shape[1],
            )
            payload += _f64(p.weights) + _f64(p.bias)
        else:
            payload = struct.pack("<BII", _KIND_GRU, spec.hidden, p.input_dim)
            for a in p.arrays():
                payload += _f64(a)
        out += struct.pack("<I", len(payload))
        out += payload
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ParseError(f"truncated stream while reading {what}", self.pos)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u8(self, what: str) -> int:
        return struct.unpack("<B", self.take(1, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def floats(self, shape: tuple[int, ...], what: str) -> np.ndarray:
        n = int(np.prod(shape))
        raw = self.take(8 * n, what)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64).reshape(shape)


def load_params(data: bytes) -> Network:
    """Rebuild a network from bytes produced by save_params."""
    r = _Reader(data)
    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}", 0)
    version = r.u8("format version")
    if version != FORMAT_VERSION:
        raise VersionError(
            f"unsupported format version {version}, expected {FORMAT_VERSION}",
            r.pos - 1,
        )
    input_dim = r.u32("input dim")
    n_layers = r.u32("layer count")

    layers: list = []
    params: list = []
    for i in range(n_layers):
        rec_len = r.u32(f"record {i} length")
        rec_start = r.pos
        kind = r.u8(f"record {i} kind")
        if kind == _KIND_FLATTEN:
            layers.append(Flatten())
            params.append(None)
        elif kind == _KIND_DENSE:
            act_idx = r.u8("activation tag")
            if act_idx >= len(ACTIVATIONS):
                raise ParseError(f"unknown activation tag {act_idx}", r.pos - 1)
            units = r.u32("dense units")
            in_dim = r.u32("dense input dim")
            w = r.floats((units, in_dim), "dense weights")
            b = r.floats((units,), "dense bias")
            layers.append(Dense(units=units, activation=ACTIVATIONS[act_idx]))
            params.append(DenseParams(weights=w, bias=b))
        elif kind == _KIND_GRU:
            hidden = r.u32("gru hidden")
            in_dim = r.u32("gru input dim")
            mats = []
            for name in ("wz", "uz", "bz", "wr", "ur", "br", "wh", "uh", "bh"):
                shape = (
                    (hidden, in_dim) if name.startswith("w")
                    else (hidden, hidden) if name.startswith("u")
                    else (hidden,)
                )
                mats.append(r.floats(shape, f"gru {name}"))
            layers.append(Gru(hidden=hidden))
            params.append(GruParams(*mats))
        else:
            raise ParseError(f"unknown layer kind {kind}", rec_start)
        if r.pos - rec_start != rec_len:
            raise ParseError(
                f"record {i} length {rec_len} does not match payload", rec_start
            )

    net = Network.__new__(Network)
    net.input_dim = input_dim
    net.layers = layers
    net.params = params
    net.version = 0
    width = input_dim
    for spec in layers:
        if isinstance(spec, Gru):
            width = spec.hidden
        elif isinstance(spec, Dense):
            width = spec.units
    net.output_dim = width
    return net
