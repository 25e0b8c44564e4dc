"""Command-line front end, experiment configuration and report files."""

from willmore_tori.cli_reports.config import Command, ExperimentConfig, Suite, Tolerances, load_experiment_config
from willmore_tori.cli_reports.runners import CheckResult, RunContext, prepare, run, stages_for
from willmore_tori.cli_reports.writers import ReportWriter, canonical_json, config_hash, read_csv_with_hash

__all__ = [
    "CheckResult",
    "Command",
    "ExperimentConfig",
    "ReportWriter",
    "RunContext",
    "Suite",
    "Tolerances",
    "canonical_json",
    "config_hash",
    "load_experiment_config",
    "prepare",
    "read_csv_with_hash",
    "run",
    "stages_for",
]
