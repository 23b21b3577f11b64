"""Consistent evaluation protocol for unsupervised anomaly detection.

A benchmarking harness for tabular anomaly detection: schema-driven
ingestion with one-hot encoding and min-max scaling, seeded train/test
split strategies (train on normals, test on everything anomalous),
imbalance-aware metrics with explicit threshold policies, two native
reference detectors (local outlier factor and a deep autoencoder), a
multi-run evaluation engine with mean±std aggregation, and executable
audits of the evaluation pitfalls the protocol is designed to avoid.
"""

from .data import (
    ColumnSpec,
    DatasetSchema,
    TabularDataset,
    load_dataset,
    load_odds_mat,
    map_positive_class,
    minmax_scale,
)
from .engine import ExperimentSpec, RunAggregate, run_experiment
from .metrics import (
    MetricsReport,
    ScoreSet,
    Threshold,
    aupr,
    auroc,
    evaluate,
    optimal_threshold,
    percentile_threshold,
    pr_curve,
    prf1,
    roc_curve,
)
from .splits import SplitResult, SplitSpec, inject_corruption, split

__version__ = "0.1.0"

__all__ = [
    "ColumnSpec",
    "DatasetSchema",
    "ExperimentSpec",
    "MetricsReport",
    "RunAggregate",
    "ScoreSet",
    "SplitResult",
    "SplitSpec",
    "TabularDataset",
    "Threshold",
    "aupr",
    "auroc",
    "evaluate",
    "inject_corruption",
    "load_dataset",
    "load_odds_mat",
    "map_positive_class",
    "minmax_scale",
    "optimal_threshold",
    "percentile_threshold",
    "pr_curve",
    "prf1",
    "roc_curve",
    "run_experiment",
    "split",
]
