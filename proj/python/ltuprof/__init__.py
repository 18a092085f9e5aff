"""LTU risk profiling and fairness audit pipeline (python bindings)."""

from ltuprof._core import (
    DataError,
    Model,
    NumericError,
    UsageError,
    accuracy,
    classify,
    conditional_spd,
    consistency,
    default_synth_config,
    generate,
    load_model,
    pr_auc,
    precision_at_k,
    quantile_threshold,
    recall_at_k,
    roc_auc,
    run_audit,
    scenario_skew_config,
    set_max_threads,
    spd,
    train_gbm,
    train_lr,
    train_plr,
    train_rf,
)

__all__ = [
    "DataError",
    "Model",
    "NumericError",
    "UsageError",
    "accuracy",
    "classify",
    "conditional_spd",
    "consistency",
    "default_synth_config",
    "generate",
    "load_model",
    "pr_auc",
    "precision_at_k",
    "quantile_threshold",
    "recall_at_k",
    "roc_auc",
    "run_audit",
    "scenario_skew_config",
    "set_max_threads",
    "spd",
    "train_gbm",
    "train_lr",
    "train_plr",
    "train_rf",
]
