"""Prey-handling classification on accelerometer and depth streams."""

from ._core import (
    LabeledVector,
    Model,
    PreyclassError,
    TimeSeries,
    accuracy,
    autonomy,
    balance,
    extract,
    extract_all,
    idnn_footprint_kb,
    kfold_split,
    metrics,
    parse_csv,
    run_cli,
    segment,
    synthesize,
    train_esn,
    train_idnn,
    train_svm,
)

__all__ = [
    "LabeledVector",
    "Model",
    "PreyclassError",
    "TimeSeries",
    "accuracy",
    "autonomy",
    "balance",
    "extract",
    "extract_all",
    "idnn_footprint_kb",
    "kfold_split",
    "metrics",
    "parse_csv",
    "run_cli",
    "segment",
    "synthesize",
    "train_esn",
    "train_idnn",
    "train_svm",
]
