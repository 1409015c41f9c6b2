"""Cross-seed aggregation of episode CSVs into per-algorithm summaries."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .runner import CSV_HEADER

METRICS = ("total_reward", "mean_q", "mae", "loss", "adaptation_time_s")
SMOOTH_WINDOW = 20
FINAL_WINDOW = 50


class SchemaError(ValueError):
    """A CSV does not carry the fixed episode-metrics schema."""


@dataclass
class AlgoSummary:
    algorithm: str
    seeds: int
    episodes: int
    curves: dict[str, np.ndarray] = field(default_factory=dict)  # seed-mean per episode
    final_means: dict[str, float] = field(default_factory=dict)  # mean of last 50 episodes
    episodes_to_best: int = 0  # 1-based argmax of the smoothed reward curve
    reward_trend: float = 0.0  # spearman(episode, smoothed total_reward)
    convergence_rate: float = 0.0


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise SchemaError(
            f"{path}: expected header {CSV_HEADER!r}, got {lines[0] if lines else ''!r}"
        )
    cols = CSV_HEADER.split(",")
    rows = [line.split(",") for line in lines[1:] if line]
    for i, row in enumerate(rows):
        if len(row) != len(cols):
            raise SchemaError(f"{path}: row {i + 2} has {len(row)} columns")
    out: dict[str, np.ndarray] = {}
    for j, name in enumerate(cols):
        if name == "converged":
            out[name] = np.array([r[j] == "true" for r in rows], dtype=float)
        else:
            out[name] = np.array([float(r[j]) for r in rows])
    return out


def smooth(values: np.ndarray, window: int = SMOOTH_WINDOW) -> np.ndarray:
    """Trailing moving average, partial windows at the start."""
    out = np.empty_like(values, dtype=float)
    csum = np.cumsum(np.insert(values.astype(float), 0, 0.0))
    for i in range(len(values)):
        lo = max(0, i - window + 1)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def _rankdata(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=float)
    i = 0
    sorted_x = x[order]
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Rank correlation; degenerate (constant) inputs score 0."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        return 0.0
    rx, ry = _rankdata(x), _rankdata(y)
    sx, sy = np.std(rx), np.std(ry)
    if sx < 1e-12 or sy < 1e-12:
        return 0.0
    return float(np.mean((rx - np.mean(rx)) * (ry - np.mean(ry))) / (sx * sy))


def aggregate(csv_paths: dict[str, list[str | Path]]) -> dict[str, AlgoSummary]:
    """Summaries keyed by algorithm from {algorithm: [csv per seed]}."""
    summaries: dict[str, AlgoSummary] = {}
    for algo in sorted(csv_paths):
        tables = [read_csv(p) for p in csv_paths[algo]]
        if not tables:
            continue
        episodes = min(len(t["episode"]) for t in tables)
        summary = AlgoSummary(algorithm=algo, seeds=len(tables), episodes=episodes)
        for metric in METRICS:
            stacked = np.stack([t[metric][:episodes] for t in tables])
            curve = stacked.mean(axis=0)
            summary.curves[metric] = curve
            tail = curve[-min(FINAL_WINDOW, episodes):]
            summary.final_means[metric] = float(tail.mean())
        conv = np.stack([t["converged"][:episodes] for t in tables])
        summary.convergence_rate = float(conv.mean())
        smoothed = smooth(summary.curves["total_reward"])
        summary.episodes_to_best = int(np.argmax(smoothed)) + 1
        summary.reward_trend = spearman(np.arange(1, episodes + 1), smoothed)
        summaries[algo] = summary
    return summaries


def scan_output_dir(root: str | Path) -> dict[str, list[Path]]:
    """Find per-algorithm CSVs via the manifests under an output directory."""
    import json

    root = Path(root)
    found: dict[str, list[Path]] = {}
    for manifest_path in sorted(root.glob("*/manifest.json")):
        manifest = json.loads(manifest_path.read_text())
        algo = manifest["algorithm"]
        paths = [manifest_path.parent / rel for rel in manifest["csv_files"].values()]
        found.setdefault(algo, []).extend(sorted(paths))
    return found
