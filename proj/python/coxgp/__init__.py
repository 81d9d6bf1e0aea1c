"""Bayesian covariate-driven intensity estimation for replicated point patterns."""

from ._coxgp import (
    CoxgpError,
    Dataset,
    fit,
    kernel_estimate,
    l2_error,
    load_dataset,
    normalize_config,
    preset_json,
    presets,
    run_experiment,
    save_dataset,
    silverman_bandwidth,
    simulate,
    truth_intensity,
    truth_norm,
)

__all__ = [
    "CoxgpError",
    "Dataset",
    "fit",
    "kernel_estimate",
    "l2_error",
    "load_dataset",
    "normalize_config",
    "preset_json",
    "presets",
    "run_experiment",
    "save_dataset",
    "silverman_bandwidth",
    "simulate",
    "truth_intensity",
    "truth_norm",
]
