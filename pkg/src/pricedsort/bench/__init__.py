"""Experiment driver, statistics and command line interface."""

from pricedsort.bench.harness import ExperimentConfig, TrialRecord, run_experiment
from pricedsort.bench.report import Binding, SummaryRow, summarize, table1_report

__all__ = ["Binding", "ExperimentConfig", "SummaryRow", "TrialRecord", "run_experiment", "summarize", "table1_report"]
