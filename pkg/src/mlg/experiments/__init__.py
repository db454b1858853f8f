"""Multi-trial experiments and report output."""

from .report import emit_report, series_from_json, series_to_json
from .runner import ExperimentError, ExperimentPlan, MetricSeries, relative_errors, run_experiment

__all__ = [
    "ExperimentError",
    "ExperimentPlan",
    "MetricSeries",
    "emit_report",
    "relative_errors",
    "run_experiment",
    "series_from_json",
    "series_to_json",
]
