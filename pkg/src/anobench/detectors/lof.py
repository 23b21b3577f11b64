"""Local outlier factor in novelty mode: fit on train, score unseen points.

Exact brute-force neighbor search, chunked so the pairwise distance matrix
never exceeds a memory budget.  Neighborhoods are tie-inclusive: every point
at exactly the k-th distance belongs to the neighborhood.  Reachability
distances are floored at 1e-12 so coincident points cannot blow up the
local reachability density.
"""

from __future__ import annotations

import numpy as np

from ..errors import DetectorError

REACH_FLOOR = 1e-12
_CHUNK_BUDGET = 5e7  # target elements per broadcast block


def _distance_block(queries: np.ndarray, train: np.ndarray) -> np.ndarray:
    """Euclidean distances via the explicit difference formula.

    The broadcast keeps summation order identical to a per-pair
    np.sum((a - b) ** 2), which is what makes naive-oracle comparisons
    exact.
    """
    diff = queries[:, None, :] - train[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _chunks(n_queries: int, n_train: int, n_features: int):
    size = max(1, int(_CHUNK_BUDGET / max(1, n_train * n_features)))
    for start in range(0, n_queries, size):
        yield start, min(start + size, n_queries)


class LofModel:
    """Immutable fit state: train points, k-distances, lrd, self-scores."""

    def __init__(self, train, k, k_distance, lrd, train_lof):
        self.train = train
        self.k = k
        self.k_distance = k_distance
        self.lrd = lrd
        self.train_lof = train_lof

    @property
    def n_features(self) -> int:
        return self.train.shape[1]


def lof_fit(train: np.ndarray, k: int) -> LofModel:
    """Precompute k-distances, neighborhoods and lrd over the train set."""
    X = np.ascontiguousarray(np.asarray(train, dtype=np.float64))
    if X.ndim != 2 or len(X) == 0:
        raise DetectorError("training matrix must be non-empty and 2-D")
    n = len(X)
    if not 1 <= k < n:
        raise DetectorError(f"k must satisfy 1 <= k < n_train, got k={k}, n={n}")
    if not np.any(X != X[0]):
        raise DetectorError("need at least 2 distinct training points")

    k_distance = np.empty(n)
    neighborhoods: list[np.ndarray] = [None] * n
    distance_rows: list[np.ndarray] = [None] * n
    for start, stop in _chunks(n, n, X.shape[1]):
        block = _distance_block(X[start:stop], X)
        for offset in range(stop - start):
            i = start + offset
            row = block[offset].copy()
            row[i] = np.inf  # self is not a neighbor of itself
            kth = np.partition(row, k - 1)[k - 1]
            k_distance[i] = kth
            neighborhoods[i] = np.flatnonzero(row <= kth)
            distance_rows[i] = row[neighborhoods[i]]

    lrd = np.empty(n)
    for i in range(n):
        reach = np.maximum(
            np.maximum(k_distance[neighborhoods[i]], distance_rows[i]), REACH_FLOOR
        )
        lrd[i] = 1.0 / (np.sum(reach) / len(reach))

    train_lof = np.empty(n)
    for i in range(n):
        neigh = neighborhoods[i]
        train_lof[i] = (np.sum(lrd[neigh]) / len(neigh)) / lrd[i]

    return LofModel(train=X, k=k, k_distance=k_distance, lrd=lrd, train_lof=train_lof)


def lof_score(model: LofModel, test: np.ndarray) -> np.ndarray:
    """Novelty LOF of each test point against the train neighborhoods."""
    Q = np.ascontiguousarray(np.asarray(test, dtype=np.float64))
    if Q.ndim != 2 or Q.shape[1] != model.n_features:
        raise DetectorError(
            f"test matrix must be 2-D with {model.n_features} columns, "
            f"got shape {Q.shape}"
        )
    X, k = model.train, model.k
    scores = np.empty(len(Q))
    for start, stop in _chunks(len(Q), len(X), X.shape[1]):
        block = _distance_block(Q[start:stop], X)
        for offset in range(stop - start):
            row = block[offset]
            kth = np.partition(row, k - 1)[k - 1]
            neigh = np.flatnonzero(row <= kth)
            reach = np.maximum(
                np.maximum(model.k_distance[neigh], row[neigh]), REACH_FLOOR
            )
            lrd_x = 1.0 / (np.sum(reach) / len(reach))
            scores[start + offset] = (np.sum(model.lrd[neigh]) / len(neigh)) / lrd_x
    return scores
