"""Experiment runner, aggregation, plots, and the comparison report."""

from .aggregate import AlgoSummary, METRICS, SchemaError, aggregate, scan_output_dir, smooth, spearman
from .config import ExperimentConfig, OUT_DIR_ENV, build_config, load_config_file
from .plots import emit_plots, render_chart
from .report import compare_report
from .runner import CSV_HEADER, RunManifest, episode_seeds, format_row, run_experiment

__all__ = [
    "AlgoSummary", "METRICS", "SchemaError", "aggregate", "scan_output_dir",
    "smooth", "spearman",
    "ExperimentConfig", "OUT_DIR_ENV", "build_config", "load_config_file",
    "emit_plots", "render_chart",
    "compare_report",
    "CSV_HEADER", "RunManifest", "episode_seeds", "format_row", "run_experiment",
]
