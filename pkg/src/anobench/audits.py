"""Executable audits of the evaluation inconsistencies this harness exposes.

Each audit returns a list of plain dict rows (easy to render or assert on):

* split bias   -- one trained detector, three competing test sets;
* class swap   -- the same scores evaluated under both classes of interest;
* ratio sweep  -- fixed-threshold F1 while the positive count is manipulated,
                  with AUROC alongside as the control that stays put.
"""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np

from . import metrics, rng, splits
from .data import TabularDataset
from .detectors import build_detector
from .metrics import ScoreSet, Threshold

log = logging.getLogger(__name__)


def audit_split_bias(
    dataset: TabularDataset,
    detector: str,
    detector_params: dict | None = None,
    seed: int = 0,
    threshold_policy: str = metrics.POLICY_PERCENTILE,
) -> list[dict]:
    """Evaluate one trained detector under competing split strategies.

    The detector is fit once on the proposed training normals.  A single
    threshold is then fixed from the proposed test scores and re-applied to
    the recycling and discarding test sets, so metric deltas come from the
    test-set composition alone.  The discarding strategy drops the training
    half's anomalies entirely (strict reading of that protocol), which is
    exactly the bias this audit surfaces.
    """
    proposed = splits.split(dataset, splits.SplitSpec(seed=seed))
    det = build_detector(detector, detector_params)
    det.fit(dataset.features[proposed.train_indices], seed=rng.derive_seed(seed, 9))

    def scoreset_for(result):
        raw = det.score(dataset.features[result.test_indices])
        return ScoreSet(raw, dataset.labels[result.test_indices], detector_name=detector)

    base_scores = scoreset_for(proposed)
    tau = metrics.resolve_threshold(base_scores, threshold_policy)
    shared_tau = Threshold(value=tau.value, policy=metrics.POLICY_FIXED)

    rows = []
    strategies = (
        splits.STRATEGY_PROPOSED,
        splits.STRATEGY_RECYCLING,
        splits.STRATEGY_DISCARDING,
    )
    baseline_f1 = baseline_aupr = None
    for strategy in strategies:
        result = (
            proposed
            if strategy == splits.STRATEGY_PROPOSED
            else splits.split(dataset, splits.SplitSpec(strategy=strategy, seed=seed))
        )
        scoreset = base_scores if strategy == splits.STRATEGY_PROPOSED else scoreset_for(result)
        report = metrics.prf1(scoreset, shared_tau)
        aupr = metrics.aupr(scoreset)
        if baseline_f1 is None:
            baseline_f1, baseline_aupr = report.f1, aupr
        rows.append(
            {
                "strategy": strategy,
                "n_test": len(result.test_indices),
                "test_anomalies": result.counts.test_anomalies,
                "test_rho": result.counts.test_anomalies / len(result.test_indices),
                "f1_at_shared_tau": report.f1,
                "aupr": aupr,
                "delta_f1": report.f1 - baseline_f1,
                "delta_aupr": aupr - baseline_aupr,
            }
        )
    return rows


def class_swap_rows(scoreset: ScoreSet, threshold: Threshold) -> list[dict]:
    """F1 under both positive-class choices for the same scores."""
    minority = metrics.prf1(scoreset, threshold, metrics.MINORITY)
    majority = metrics.prf1(scoreset, threshold, metrics.MAJORITY)
    accuracy = (minority.confusion[0] + minority.confusion[2]) / len(scoreset)
    inflated = majority.f1 - minority.f1
    if accuracy > scoreset.rho and majority.f1 < minority.f1:
        log.warning(
            "class-swap audit: majority F1 (%.4f) below minority F1 (%.4f) despite "
            "accuracy %.4f > rho %.4f", majority.f1, minority.f1, accuracy, scoreset.rho
        )
    return [
        {"positive_class": metrics.MINORITY, "precision": minority.precision,
         "recall": minority.recall, "f1": minority.f1},
        {"positive_class": metrics.MAJORITY, "precision": majority.precision,
         "recall": majority.recall, "f1": majority.f1,
         "inflation": inflated, "accuracy": accuracy},
    ]


def audit_class_swap(
    dataset: TabularDataset,
    detector: str,
    detector_params: dict | None = None,
    seed: int = 0,
    threshold_policy: str = metrics.POLICY_OPTIMAL_F1,
) -> list[dict]:
    """Train once under the proposed split, report both classes of interest."""
    result = splits.split(dataset, splits.SplitSpec(seed=seed))
    det = build_detector(detector, detector_params)
    det.fit(dataset.features[result.train_indices], seed=rng.derive_seed(seed, 9))
    raw = det.score(dataset.features[result.test_indices])
    scoreset = ScoreSet(raw, dataset.labels[result.test_indices], detector_name=detector)
    threshold = metrics.resolve_threshold(scoreset, threshold_policy)
    return class_swap_rows(scoreset, threshold)


def audit_ratio_manipulation(
    scoreset: ScoreSet,
    ratios=(0.5, 1.0, 2.0),
    seed: int = 0,
    tau: Threshold | None = None,
) -> list[dict]:
    """Fixed-threshold F1 while positives are up/down-sampled.

    Ratios > 1 duplicate positives (whole copies plus a seeded remainder),
    ratios < 1 subsample them; negatives are untouched.  AUROC is reported
    for every ratio as the rank statistic that duplication cannot move.
    """
    if tau is None:
        tau = metrics.percentile_threshold(scoreset, scoreset.rho)
    fixed = Threshold(value=tau.value, policy=metrics.POLICY_FIXED)
    pos = np.flatnonzero(scoreset.labels == 1)
    neg = np.flatnonzero(scoreset.labels == 0)
    baseline_auroc = metrics.auroc(scoreset)

    rows = []
    for ratio in ratios:
        if ratio <= 0:
            raise ValueError(f"ratio must be positive, got {ratio}")
        target = int(np.floor(ratio * len(pos) + 0.5))
        if target < 1:
            raise ValueError(f"ratio {ratio} removes every positive sample")
        whole, remainder = divmod(target, len(pos))
        chosen = np.concatenate(
            [np.tile(pos, whole), rng.subsample(rng.derive_seed(seed, 5), pos, remainder)]
        ).astype(np.int64)
        keep = np.concatenate([neg, chosen])
        resampled = ScoreSet(
            scoreset.scores[keep],
            scoreset.labels[keep],
            detector_name=scoreset.detector_name,
        )
        report = metrics.prf1(resampled, fixed)
        rows.append(
            {
                "ratio": ratio,
                "n_pos": target,
                "precision": report.precision,
                "recall": report.recall,
                "f1": report.f1,
                "auroc": metrics.auroc(resampled),
                "delta_auroc": metrics.auroc(resampled) - baseline_auroc,
            }
        )
    return rows
