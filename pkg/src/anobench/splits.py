"""Train/test split strategies with seeded, portable randomness.

"proposed" trains on a fraction of the normal samples and tests on the
remaining normals plus every anomaly.  The competing strategies from the
literature are kept around so their biases can be audited: "recycling"
(fixed 50-50 normal split), "discarding" (halve everything, strip anomalies
from the training half and lose them), "balanced_test" (test set forced to
50 percent anomalies) and "anomaly_train" (train on half the anomalies).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import rng
from .errors import DataError

STRATEGY_PROPOSED = "proposed"
STRATEGY_RECYCLING = "recycling"
STRATEGY_DISCARDING = "discarding"
STRATEGY_BALANCED_TEST = "balanced_test"
STRATEGY_ANOMALY_TRAIN = "anomaly_train"

STRATEGIES = (
    STRATEGY_PROPOSED,
    STRATEGY_RECYCLING,
    STRATEGY_DISCARDING,
    STRATEGY_BALANCED_TEST,
    STRATEGY_ANOMALY_TRAIN,
)


class SplitCounts(NamedTuple):
    train_normals: int
    train_anomalies: int
    test_normals: int
    test_anomalies: int


@dataclass(frozen=True)
class SplitSpec:
    strategy: str = STRATEGY_PROPOSED
    seed: int = 0
    normal_train_fraction: float = 0.5
    corruption_ratio: float = 0.0
    reshuffle_each_run: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0.0 < self.normal_train_fraction < 1.0:
            raise ValueError("normal_train_fraction must be in (0, 1)")
        if not 0.0 <= self.corruption_ratio < 1.0:
            raise ValueError("corruption_ratio must be in [0, 1)")
        if self.corruption_ratio > 0 and self.strategy != STRATEGY_PROPOSED:
            raise ValueError("corruption applies only to the proposed strategy")


@dataclass(frozen=True)
class SplitResult:
    train_indices: np.ndarray
    test_indices: np.ndarray
    counts: SplitCounts
    strategy: str
    seed: int

    def __post_init__(self):
        train = np.sort(np.asarray(self.train_indices, dtype=np.int64))
        test = np.sort(np.asarray(self.test_indices, dtype=np.int64))
        if np.intersect1d(train, test).size:
            raise DataError("train and test indices overlap")
        train.setflags(write=False)
        test.setflags(write=False)
        object.__setattr__(self, "train_indices", train)
        object.__setattr__(self, "test_indices", test)


def _labels_of(dataset) -> np.ndarray:
    labels = getattr(dataset, "labels", dataset)
    return np.asarray(labels).astype(np.uint8)


def split(dataset, spec: SplitSpec) -> SplitResult:
    """Deterministic split of a dataset under the given strategy and seed."""
    y = _labels_of(dataset)
    normals = np.flatnonzero(y == 0)
    anomalies = np.flatnonzero(y == 1)
    if len(anomalies) < 1 or len(normals) < 2:
        raise DataError(
            f"need >=1 anomaly and >=2 normals, got {len(anomalies)}/{len(normals)}"
        )
    seed = spec.seed

    if spec.strategy in (STRATEGY_PROPOSED, STRATEGY_RECYCLING):
        fraction = (
            spec.normal_train_fraction if spec.strategy == STRATEGY_PROPOSED else 0.5
        )
        shuffled = rng.shuffled(seed, normals)
        n_train = int(np.floor(fraction * len(normals)))
        if n_train == 0 or n_train == len(normals):
            raise DataError(
                f"fraction {fraction} leaves an empty train or test set "
                f"({len(normals)} normals)"
            )
        train = shuffled[:n_train]
        test = np.concatenate([shuffled[n_train:], anomalies])

    elif spec.strategy == STRATEGY_DISCARDING:
        everything = rng.permutation(seed, len(y))
        half = len(y) // 2
        train_half, test = everything[:half], everything[half:]
        train = train_half[y[train_half] == 0]  # anomalies here are discarded
        if len(train) == 0 or len(test) == 0:
            raise DataError("discarding split left an empty train or test set")

    elif spec.strategy == STRATEGY_BALANCED_TEST:
        shuffled = rng.shuffled(seed, normals)
        n_train = int(np.floor(0.5 * len(normals)))
        if n_train == 0:
            raise DataError("too few normals for a balanced-test split")
        train = shuffled[:n_train]
        held_out = shuffled[n_train:]
        if len(anomalies) > len(held_out):
            raise DataError(
                f"cannot balance test set: {len(anomalies)} anomalies but only "
                f"{len(held_out)} held-out normals"
            )
        test_normals = rng.subsample(rng.derive_seed(seed, 11), held_out, len(anomalies))
        test = np.concatenate([test_normals, anomalies])

    elif spec.strategy == STRATEGY_ANOMALY_TRAIN:
        shuffled = rng.shuffled(seed, anomalies)
        n_train = int(np.floor(0.5 * len(anomalies)))
        if n_train == 0:
            raise DataError("too few anomalies to train on half of them")
        train = shuffled[:n_train]
        test = np.concatenate([shuffled[n_train:], normals])

    else:  # pragma: no cover - guarded by SplitSpec
        raise ValueError(spec.strategy)

    return SplitResult(
        train_indices=train,
        test_indices=test,
        counts=_counts(y, train, test),
        strategy=spec.strategy,
        seed=seed,
    )


def _counts(y: np.ndarray, train: np.ndarray, test: np.ndarray) -> SplitCounts:
    return SplitCounts(
        train_normals=int(np.sum(y[train] == 0)),
        train_anomalies=int(np.sum(y[train] == 1)),
        test_normals=int(np.sum(y[test] == 0)),
        test_anomalies=int(np.sum(y[test] == 1)),
    )


def inject_corruption(
    result: SplitResult, dataset, ratio: float, seed: int
) -> SplitResult:
    """Move round(ratio * total anomalies) anomalies from test into train.

    Moved anomalies keep their labels for bookkeeping but are exposed to
    detectors unlabeled (the engine only ever hands features to training).
    A ratio of 0 is the identity; draining the test set of anomalies is an
    error.
    """
    if not 0.0 <= ratio < 1.0:
        raise DataError(f"corruption ratio must be in [0, 1), got {ratio}")
    if ratio == 0.0:
        return result
    y = _labels_of(dataset)
    test_anoms = result.test_indices[y[result.test_indices] == 1]
    total_anoms = int(np.sum(y == 1))
    moved_count = int(np.floor(ratio * total_anoms + 0.5))
    if moved_count < 1:
        raise DataError(
            f"corruption ratio {ratio} moves no anomaly (only {total_anoms} available)"
        )
    if moved_count >= len(test_anoms):
        raise DataError(
            f"moving {moved_count} of {len(test_anoms)} test anomalies would empty "
            "the test anomaly set"
        )
    moved = rng.subsample(seed, test_anoms, moved_count)
    train = np.concatenate([result.train_indices, moved])
    test = np.setdiff1d(result.test_indices, moved)
    return SplitResult(
        train_indices=train,
        test_indices=test,
        counts=_counts(y, train, test),
        strategy=result.strategy,
        seed=result.seed,
    )


def spec_for_run(spec: SplitSpec, run: int) -> SplitSpec:
    """Per-run spec: fixed seed unless the spec asks to reshuffle each run."""
    if not spec.reshuffle_each_run or run == 0:
        return spec
    return replace(spec, seed=rng.derive_seed(spec.seed, rng.LANE_SPLIT, run))


# ---------------------------------------------------------------------------
# Index-list export: one index per line, '#' provenance comments allowed.
# ---------------------------------------------------------------------------


def write_indices(path, indices: np.ndarray, provenance: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in (provenance or {}).items():
            fh.write(f"# {key}: {value}\n")
        for idx in np.asarray(indices).tolist():
            fh.write(f"{int(idx)}\n")


def read_indices(path) -> np.ndarray:
    p = Path(path)
    if not p.exists():
        raise DataError(f"index file not found: {p}")
    values = []
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(int(line))
        except ValueError as exc:
            raise DataError(f"{p}:{lineno}: not an index: {line!r}") from exc
    if not values:
        raise DataError(f"{p}: no indices")
    return np.array(values, dtype=np.int64)


def export_split(result: SplitResult, directory, run: int) -> tuple[Path, Path]:
    """Write run-<r>.train.csv / run-<r>.test.csv index lists."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "strategy": result.strategy,
        "seed": result.seed,
        "run": run,
        "counts": ",".join(str(c) for c in result.counts),
    }
    train_path = directory / f"run-{run}.train.csv"
    test_path = directory / f"run-{run}.test.csv"
    write_indices(train_path, result.train_indices, {**meta, "role": "train"})
    write_indices(test_path, result.test_indices, {**meta, "role": "test"})
    return train_path, test_path
