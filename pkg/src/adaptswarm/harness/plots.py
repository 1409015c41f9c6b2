"""Deterministic SVG line charts, one file per metric."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .aggregate import AlgoSummary, METRICS

WIDTH, HEIGHT = 800, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 40, 50

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

TITLES = {
    "mean_q": "Mean Q value per episode",
    "total_reward": "Total reward per episode",
    "mae": "Mean absolute error per episode",
    "adaptation_time_s": "Adaptation time (s) per episode",
    "loss": "Loss per episode",
}


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def render_chart(metric: str, series: dict[str, np.ndarray]) -> str:
    """One SVG chart with a polyline per algorithm, text-deterministic."""
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B
    xs_max = max(len(v) for v in series.values())
    all_vals = np.concatenate([v[np.isfinite(v)] for v in series.values()])
    lo, hi = float(all_vals.min()), float(all_vals.max())
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0

    def px(i: int, n: int) -> float:
        frac = i / (n - 1) if n > 1 else 0.0
        return MARGIN_L + frac * plot_w

    def py(v: float) -> float:
        frac = (v - lo) / (hi - lo)
        return MARGIN_T + (1.0 - frac) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{TITLES[metric]}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#999"/>',
    ]
    for tick in _ticks(lo, hi):
        y = py(tick)
        parts.append(
            f'<line x1="{MARGIN_L}" y1="{_fmt(y)}" x2="{MARGIN_L + plot_w}" '
            f'y2="{_fmt(y)}" stroke="#ddd"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 6}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(tick)}</text>'
        )
    for tick in _ticks(1, xs_max):
        x = px(int(round(tick)) - 1, xs_max)
        parts.append(
            f'<text x="{_fmt(x)}" y="{HEIGHT - MARGIN_B + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{int(round(tick))}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_L + plot_w // 2}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">episode</text>'
    )
    for idx, (name, values) in enumerate(sorted(series.items())):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(
            f"{_fmt(px(i, len(values)))},{_fmt(py(float(v)))}"
            for i, v in enumerate(values)
            if math.isfinite(v)
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'
        )
        ly = MARGIN_T + 16 + idx * 18
        lx = MARGIN_L + plot_w + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plots(summaries: dict[str, AlgoSummary], outdir: str | Path
               ) -> tuple[list[Path], list[str]]:
    """Write one chart per metric; metrics with no finite data are skipped
    with a warning instead of an empty chart."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    warnings: list[str] = []
    for metric in METRICS:
        series = {}
        for algo, summary in summaries.items():
            curve = summary.curves.get(metric)
            if curve is not None and len(curve) and np.isfinite(curve).any():
                series[algo] = curve
        if not series:
            warnings.append(f"metric {metric}: no finite data, chart omitted")
            continue
        path = outdir / f"plot_{metric}.svg"
        path.write_text(render_chart(metric, series))
        written.append(path)
    return written, warnings
