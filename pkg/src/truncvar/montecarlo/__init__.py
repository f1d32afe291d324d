"""Seeded Monte Carlo verification campaigns."""

from .config import ExperimentConfig, ExperimentKind, Thresholds, load_config
from .experiments import (
    BETA,
    corrected_c,
    run_as_limit,
    run_experiment,
    run_scaling_check,
    run_small_c,
    run_time_rescale,
    stream,
    verify_laplace,
)
from .renewal import Family, RenewalInputs, run_renewal_clt
from .report import Check, ExperimentReport
from .stats import SampleTooSmallError, ks_distance, ks_statistic, ks_two_sample, moment_summary

__all__ = [
    "BETA",
    "Check",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentReport",
    "Family",
    "RenewalInputs",
    "SampleTooSmallError",
    "Thresholds",
    "corrected_c",
    "ks_distance",
    "ks_statistic",
    "ks_two_sample",
    "load_config",
    "moment_summary",
    "run_as_limit",
    "run_experiment",
    "run_renewal_clt",
    "run_scaling_check",
    "run_small_c",
    "run_time_rescale",
    "stream",
    "verify_laplace",
]
