"""Scenario runner and command line for the power-band estimators."""

from .harness import (
    ALGORITHMS,
    MetricsRow,
    QSweepRow,
    Scenario,
    TimingRow,
    analyze_window,
    compute_metrics,
    make_scenario,
    run_q_sweep,
    run_scenario,
    run_timing_study,
    runtime_ratio,
)

__all__ = [
    "ALGORITHMS", "MetricsRow", "QSweepRow", "Scenario", "TimingRow", "analyze_window",
    "compute_metrics", "make_scenario", "run_q_sweep", "run_scenario", "run_timing_study", "runtime_ratio",
]
