"""Shared fixtures: synthetic datasets and optional real-data discovery."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from anobench.data import TabularDataset

DATA_DIR = Path(os.environ.get("ANOBENCH_DATA_DIR", Path(__file__).parent.parent / "data"))


def dataset_path(filename: str) -> Path:
    return DATA_DIR / filename


def require_file(filename: str) -> Path:
    path = dataset_path(filename)
    if not path.exists():
        pytest.skip(
            f"real dataset file {filename} not present under {DATA_DIR} "
            f"(set ANOBENCH_DATA_DIR; see README for expected files)"
        )
    return path


def synthetic_dataset(
    n_normals=400, n_anomalies=40, n_features=8, seed=0, name="synthetic"
) -> TabularDataset:
    """Normals in a tight blob, anomalies pushed outward; scaled to [0, 1]."""
    gen = np.random.Generator(np.random.PCG64(seed))
    normals = gen.normal(0.0, 1.0, size=(n_normals, n_features))
    anomalies = gen.normal(0.0, 1.0, size=(n_anomalies, n_features)) + gen.choice(
        [-4.0, 4.0], size=(n_anomalies, n_features)
    )
    X = np.vstack([normals, anomalies])
    y = np.concatenate([np.zeros(n_normals, dtype=int), np.ones(n_anomalies, dtype=int)])
    order = gen.permutation(len(y))
    X, y = X[order], y[order]
    lo, hi = X.min(axis=0), X.max(axis=0)
    X = (X - lo) / np.where(hi - lo > 0, hi - lo, 1.0)
    return TabularDataset(name=name, features=X, labels=y)


@pytest.fixture
def small_dataset():
    return synthetic_dataset(n_normals=120, n_anomalies=16, n_features=5, seed=7)
