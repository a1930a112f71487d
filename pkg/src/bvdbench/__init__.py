"""Toolkit for highly imbalanced herd-disease classification and anomaly
detection, with a synthetic panel simulator and a benchmark harness."""

from .balance import ClassWeights, ResamplePlan, class_weights, random_resample, smote
from .crossval import FoldPlan, ModelSpec, cross_validate, kfold, threshold_sweep
from .dataio import (
    CsvSchema,
    Dataset,
    Standardizer,
    apply_standardizer,
    expand_interactions,
    fit_standardizer,
    load_csv,
)
from .herdgraph import NeighborGraph, centralities, local_density
from .metrics import ConfusionMatrix, MetricSummary, confusion, roc_auc, summarize
from .simgen import (
    HerdYearRecord,
    PanelData,
    SimConfig,
    latent_mean,
    panel_to_dataset,
    simulate_panel,
)

__version__ = "0.1.0"

__all__ = [
    "ClassWeights",
    "ConfusionMatrix",
    "CsvSchema",
    "Dataset",
    "FoldPlan",
    "HerdYearRecord",
    "MetricSummary",
    "ModelSpec",
    "NeighborGraph",
    "PanelData",
    "ResamplePlan",
    "SimConfig",
    "Standardizer",
    "apply_standardizer",
    "centralities",
    "class_weights",
    "confusion",
    "cross_validate",
    "expand_interactions",
    "fit_standardizer",
    "kfold",
    "latent_mean",
    "load_csv",
    "local_density",
    "panel_to_dataset",
    "random_resample",
    "roc_auc",
    "simulate_panel",
    "smote",
    "summarize",
    "threshold_sweep",
]
