"""Deterministic tick-stepped message bus with seeded drops and delays."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FaultProfile:
    drop_prob: float = 0.0
    delay_min: int = 0  # extra ticks on top of the 1-tick transit
    delay_max: int = 1
    crashes: list[tuple[int, int]] = field(default_factory=list)  # (tick, peer id)

    @classmethod
    def from_dict(cls, data: dict) -> "FaultProfile":
        allowed = {"drop_prob", "delay_min", "delay_max", "crashes"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown fault profile keys: {sorted(unknown)}")
        crashes = [tuple(c) for c in data.get("crashes", [])]
        return cls(
            drop_prob=data.get("drop_prob", 0.0),
            delay_min=data.get("delay_min", 0),
            delay_max=data.get("delay_max", 1),
            crashes=crashes,
        )


@dataclass
class BusMessage:
    kind: str
    sender: int
    receiver: int
    payload: dict
    sent_at: int
    seq: int
    deliver_at: int | None = None  # fate not yet rolled when None
    dropped: bool | None = None


class MessageBus:
    def __init__(self):
        self.pending: list[BusMessage] = []
        self._seq = 0

    def send(self, kind: str, sender: int, receiver: int, payload: dict,
             now: int) -> BusMessage:
        msg = BusMessage(kind=kind, sender=sender, receiver=receiver,
                         payload=payload, sent_at=now, seq=self._seq)
        self._seq += 1
        self.pending.append(msg)
        return msg


def step_bus(bus: MessageBus, profile: FaultProfile, rng: np.random.Generator,
             now: int) -> list[BusMessage]:
    """Roll drop/delay fate for fresh messages, then deliver everything due.

    Dropped messages are never delivered.  Delivery order is (deliver_at,
    send sequence), so identical seeds give identical schedules.
    """
    for msg in bus.pending:
        if msg.deliver_at is None:
            dropped = rng.random() < profile.drop_prob
            delay = int(rng.integers(profile.delay_min, profile.delay_max + 1))
            msg.dropped = bool(dropped)
            msg.deliver_at = msg.sent_at + 1 + delay
    due = [m for m in bus.pending if m.deliver_at <= now]
    bus.pending = [m for m in bus.pending if m.deliver_at > now]
    due.sort(key=lambda m: (m.deliver_at, m.seq))
    return [m for m in due if not m.dropped]
