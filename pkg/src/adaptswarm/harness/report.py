"""Cross-algorithm ranking table over the aggregated summaries."""

from __future__ import annotations

from .aggregate import AlgoSummary, METRICS

# direction of "better" per metric
HIGHER_IS_BETTER = {
    "total_reward": True,
    "mean_q": True,
    "mae": False,
    "loss": False,
    "adaptation_time_s": False,
}

DISCLAIMER = ("observed at desk scale on a simulated cluster; "
              "not comparable to live-cluster measurements")


def compare_report(summaries: dict[str, AlgoSummary]) -> str:
    """Rank algorithms per metric on final-window means; ties break
    alphabetically by tag."""
    if len(summaries) < 2:
        raise ValueError("a comparison needs at least two algorithms")
    algos = sorted(summaries)
    seeds = {summaries[a].seeds for a in algos}
    episodes = {summaries[a].episodes for a in algos}
    lines = []
    lines.append("algorithm comparison (" + DISCLAIMER + ")")
    lines.append(f"seeds per algorithm: {sorted(seeds)}; episodes: {sorted(episodes)}")
    lines.append("")
    lines.append(f"{'metric':<20} ranking (best first, final-{min(50, min(episodes))}-episode means)")
    lines.append("-" * 72)
    for metric in METRICS:
        higher = HIGHER_IS_BETTER[metric]
        ranked = sorted(
            algos,
            key=lambda a: (
                -summaries[a].final_means[metric] if higher
                else summaries[a].final_means[metric],
                a,
            ),
        )
        cells = " > ".join(
            f"{a}({summaries[a].final_means[metric]:.4g})" for a in ranked
        )
        lines.append(f"{metric:<20} {cells}")
    lines.append("")
    lines.append(f"{'algorithm':<12} {'episodes_to_best':>16} {'reward_trend':>13} "
                 f"{'convergence_rate':>17}")
    for a in algos:
        s = summaries[a]
        lines.append(f"{a:<12} {s.episodes_to_best:>16d} {s.reward_trend:>13.4f} "
                     f"{s.convergence_rate:>17.4f}")
    return "\n".join(lines) + "\n"
