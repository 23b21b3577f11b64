"""Experiment orchestration: dataset x detector x split x runs -> aggregate.

Detectors never see labels: training receives the train-row feature matrix
and nothing else.  External detectors participate as frozen score producers
through the score-file wire format, validated against the exported test
indices, so the same protocol applies to every model regardless of stack.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics, rng, splits
from .data import TabularDataset
from .detectors import build_detector
from .errors import DataError, DetectorError
from .metrics import MetricsReport, ScoreSet

log = logging.getLogger(__name__)

EXTERNAL_PREFIX = "scores:"


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    detector: str  # registry name, or "scores:<pattern-with-{run}>"
    split: splits.SplitSpec = field(default_factory=splits.SplitSpec)
    detector_params: dict = field(default_factory=dict)
    n_runs: int = 20
    threshold_policy: str = metrics.POLICY_OPTIMAL_F1
    positive_class: str = metrics.MINORITY

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.threshold_policy not in (
            metrics.POLICY_PERCENTILE,
            metrics.POLICY_OPTIMAL_F1,
        ):
            raise ValueError(f"unknown threshold policy {self.threshold_policy!r}")
        if self.positive_class not in (metrics.MINORITY, metrics.MAJORITY):
            raise ValueError(f"unknown positive class {self.positive_class!r}")

    @property
    def is_external(self) -> bool:
        return self.detector.startswith(EXTERNAL_PREFIX)

    @property
    def detector_label(self) -> str:
        if not self.is_external:
            return self.detector
        stem = Path(self.score_pattern).parts
        return stem[-3] if len(stem) >= 3 and stem[-2] == "scores" else "external"

    @property
    def score_pattern(self) -> str:
        return self.detector[len(EXTERNAL_PREFIX) :]


AGGREGATE_METRICS = ("precision", "recall", "f1", "auroc", "aupr")


@dataclass
class RunAggregate:
    """Per-metric mean and sample standard deviation over repeated runs."""

    experiment: str
    detector: str
    dataset: str
    reports: list[MetricsReport]
    split_results: list[splits.SplitResult]
    seeds: list[int]

    @property
    def n_runs(self) -> int:
        return len(self.reports)

    def values(self, metric: str) -> np.ndarray:
        vals = [getattr(r, metric) for r in self.reports]
        if any(v is None for v in vals):
            raise ValueError(f"metric {metric!r} missing from some runs")
        return np.asarray(vals, dtype=np.float64)

    def mean(self, metric: str) -> float:
        return float(np.mean(self.values(metric)))

    def std(self, metric: str) -> float:
        vals = self.values(metric)
        if len(vals) < 2 or np.all(vals == vals[0]):
            # identical runs have sample std exactly 0; the two-pass formula
            # can leave ulp-level residue via the rounded mean
            return 0.0
        return float(np.std(vals, ddof=1))

    def summary(self) -> dict:
        out = {"experiment": self.experiment, "detector": self.detector,
               "dataset": self.dataset, "n_runs": self.n_runs}
        for m in AGGREGATE_METRICS:
            out[f"{m}_mean"] = self.mean(m)
            out[f"{m}_std"] = self.std(m)
        return out


def run_experiment(dataset: TabularDataset, spec: ExperimentSpec) -> RunAggregate:
    """Execute every run of an experiment and aggregate the reports."""
    reports: list[MetricsReport] = []
    split_results: list[splits.SplitResult] = []
    seeds: list[int] = []
    for run in range(spec.n_runs):
        report, result, seed = _single_run(dataset, spec, run)
        reports.append(report)
        split_results.append(result)
        seeds.append(seed)
    return RunAggregate(
        experiment=spec.name,
        detector=spec.detector_label,
        dataset=dataset.name,
        reports=reports,
        split_results=split_results,
        seeds=seeds,
    )


def split_for_run(dataset: TabularDataset, spec: ExperimentSpec, run: int):
    run_spec = splits.spec_for_run(spec.split, run)
    result = splits.split(dataset, run_spec)
    if run_spec.corruption_ratio > 0:
        corruption_seed = rng.derive_seed(run_spec.seed, rng.LANE_CORRUPTION, run)
        result = splits.inject_corruption(
            result, dataset, run_spec.corruption_ratio, corruption_seed
        )
    return result, run_spec


def _single_run(dataset: TabularDataset, spec: ExperimentSpec, run: int):
    result, run_spec = split_for_run(dataset, spec, run)
    detector_seed = rng.derive_seed(spec.split.seed, rng.LANE_DETECTOR, run)
    test_labels = dataset.labels[result.test_indices]

    if spec.is_external:
        scoreset = _read_external_scores(spec, run, result, test_labels)
    else:
        try:
            detector = build_detector(spec.detector, spec.detector_params)
            detector.fit(dataset.features[result.train_indices], seed=detector_seed)
            raw = detector.score(dataset.features[result.test_indices])
        except DetectorError as exc:
            raise DetectorError(f"run {run}: {exc}") from exc
        scoreset = ScoreSet(raw, test_labels, detector_name=spec.detector)

    report = metrics.evaluate(
        scoreset, policy=spec.threshold_policy, positive_class=spec.positive_class
    )
    log.debug(
        "%s run %d: seed=%d f1=%.4f auroc=%.4f",
        spec.name, run, detector_seed, report.f1, report.auroc,
    )
    return report, result, detector_seed


def _read_external_scores(spec, run, result, test_labels) -> ScoreSet:
    path = Path(spec.score_pattern.format(run=run))
    if not path.exists():
        raise DataError(
            f"score file for run {run} not found: {path} "
            f"(runs configured: {spec.n_runs})"
        )
    indices, scoreset = metrics.read_score_file(path)
    expected = result.test_indices
    if len(indices) != len(expected) or set(indices.tolist()) != set(expected.tolist()):
        raise DataError(
            f"{path}: score rows do not cover exactly the test set "
            f"({len(indices)} rows vs {len(expected)} test samples)"
        )
    order = np.argsort(indices)
    aligned_scores = scoreset.scores[order][np.searchsorted(indices[order], expected)]
    aligned_labels = scoreset.labels[order][np.searchsorted(indices[order], expected)]
    if not np.array_equal(aligned_labels, test_labels):
        raise DataError(f"{path}: labels disagree with the dataset's test labels")
    return ScoreSet(
        aligned_scores,
        test_labels,
        detector_name=scoreset.detector_name or spec.detector_label,
        orientation_flipped=scoreset.orientation_flipped,
    )


# ---------------------------------------------------------------------------
# Result persistence: results/<dataset>/<detector>/run-<r>.json
# ---------------------------------------------------------------------------


def write_run_reports(aggregate: RunAggregate, results_dir) -> Path:
    base = Path(results_dir) / aggregate.dataset / aggregate.detector
    base.mkdir(parents=True, exist_ok=True)
    for run, (report, seed) in enumerate(zip(aggregate.reports, aggregate.seeds)):
        payload = report.as_dict()
        payload.update({"run": run, "seed": seed, "experiment": aggregate.experiment})
        path = base / f"run-{run}.json"
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return base


def read_run_reports(results_dir, dataset: str, detector: str) -> list[dict]:
    base = Path(results_dir) / dataset / detector
    runs = sorted(base.glob("run-*.json"), key=lambda p: int(p.stem.split("-")[1]))
    if not runs:
        raise DataError(f"no run reports under {base}")
    return [json.loads(p.read_text(encoding="utf-8")) for p in runs]
