"""Agent checkpoints: a manifest header followed by network snapshots."""

from __future__ import annotations

import json
import struct
from pathlib import Path

from ..nn.network import Network
from ..nn.serialize import ParseError, load_params, save_params

MAGIC = b"ADCK"
VERSION = 1


def save_agent(agent, path: str | Path, config_hash: str = "") -> None:
    nets = agent.networks()
    header = {
        "algorithm": agent.algorithm,
        "config_hash": config_hash,
        "networks": sorted(nets),
    }
    hraw = json.dumps(header, sort_keys=True).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<B", VERSION)
    out += struct.pack("<I", len(hraw))
    out += hraw
    for name in sorted(nets):
        blob = save_params(nets[name])
        out += struct.pack("<I", len(blob))
        out += blob
    Path(path).write_bytes(bytes(out))


def load_checkpoint(path: str | Path) -> tuple[dict, dict[str, Network]]:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ParseError(f"bad checkpoint magic {data[:4]!r}", 0)
    pos = 4
    version = data[pos]
    pos += 1
    if version != VERSION:
        raise ParseError(f"unsupported checkpoint version {version}", 4)
    (hlen,) = struct.unpack_from("<I", data, pos)
    pos += 4
    header = json.loads(data[pos:pos + hlen].decode("utf-8"))
    pos += hlen
    nets: dict[str, Network] = {}
    for name in header["networks"]:
        if pos + 4 > len(data):
            raise ParseError(f"truncated checkpoint before network {name}", pos)
        (blen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + blen > len(data):
            raise ParseError(f"truncated network blob {name}", pos)
        nets[name] = load_params(data[pos:pos + blen])
        pos += blen
    return header, nets


def restore_agent(agent, path: str | Path) -> dict:
    """Load a checkpoint into an already-constructed agent of the same tag."""
    header, nets = load_checkpoint(path)
    if header["algorithm"] != agent.algorithm:
        raise ValueError(
            f"checkpoint is for {header['algorithm']!r}, agent is {agent.algorithm!r}"
        )
    agent.load_networks(nets)
    return header
