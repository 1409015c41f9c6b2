"""Transition storage: a uniform ring buffer and whole-episode replay."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Transition:
    s: np.ndarray
    a: int
    r: float
    s2: np.ndarray
    done: bool
    a_vec: np.ndarray | None = None  # continuous action representation (ddpg)


class ReplayBuffer:
    """Bounded ring of transitions with seeded uniform sampling."""

    def __init__(self, capacity: int, seed: int = 0):
        self.capacity = int(capacity)
        self.rng = np.random.default_rng(seed)
        self._ring: list[Transition] = []
        self._next = 0

    def __len__(self) -> int:
        return len(self._ring)

    def add(self, tr: Transition) -> None:
        if len(self._ring) < self.capacity:
            self._ring.append(tr)
        else:
            self._ring[self._next] = tr  # oldest evicted first
        self._next = (self._next + 1) % self.capacity

    def sample(self, batch_size: int) -> list[Transition]:
        if batch_size > len(self._ring):
            raise ValueError(f"batch {batch_size} exceeds buffer size {len(self._ring)}")
        idx = self.rng.integers(0, len(self._ring), size=batch_size)
        return [self._ring[i] for i in idx]

    def __contains__(self, tr: Transition) -> bool:
        return any(t is tr for t in self._ring)


@dataclass
class SequenceWindow:
    transitions: list[Transition]
    pad: int  # leading zero-observation slots when the episode was short


@dataclass
class EpisodeReplay:
    """Completed episodes kept whole so windows never cross boundaries."""

    capacity_transitions: int = 50000
    episodes: list[list[Transition]] = field(default_factory=list)
    _stored: int = 0

    def add_episode(self, transitions: list[Transition]) -> None:
        if not transitions:
            return
        self.episodes.append(list(transitions))
        self._stored += len(transitions)
        while self._stored > self.capacity_transitions and len(self.episodes) > 1:
            dropped = self.episodes.pop(0)
            self._stored -= len(dropped)

    def __len__(self) -> int:
        return len(self.episodes)


def sample_sequences(er: EpisodeReplay, batch: int, seq_len: int,
                     rng: np.random.Generator) -> list[SequenceWindow] | None:
    """Contiguous length-L windows, uniform over valid start offsets.

    Episodes shorter than L yield a single left-padded window; returns
    None when the replay holds no episodes yet.
    """
    if not er.episodes:
        return None
    windows = []
    for _ in range(batch):
        ep = er.episodes[int(rng.integers(0, len(er.episodes)))]
        if len(ep) >= seq_len:
            start = int(rng.integers(0, len(ep) - seq_len + 1))
            windows.append(SequenceWindow(ep[start:start + seq_len], pad=0))
        else:
            windows.append(SequenceWindow(list(ep), pad=seq_len - len(ep)))
    return windows
