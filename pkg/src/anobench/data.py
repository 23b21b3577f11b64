"""Dataset ingestion: schema-driven loading, one-hot encoding, min-max scaling.

Labels are collapsed to a binary anomaly indicator with the minority class
as positive.  Scaling statistics are computed on the full dataset before any
split and are recorded so inputs can be recovered (and so the cache sidecar
can carry them).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import DataError

log = logging.getLogger(__name__)

KIND_CONTINUOUS = "continuous"
KIND_CATEGORICAL = "categorical"
KIND_LABEL = "label"

CACHE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str = KIND_CONTINUOUS
    dropped: bool = False

    def __post_init__(self):
        if self.kind not in (KIND_CONTINUOUS, KIND_CATEGORICAL, KIND_LABEL):
            raise ValueError(f"unknown column kind {self.kind!r}")


@dataclass(frozen=True)
class DatasetSchema:
    """Declared structure of a raw tabular file."""

    name: str
    columns: tuple[ColumnSpec, ...]
    anomaly_classes: frozenset[str]
    has_header: bool = True

    def __post_init__(self):
        labels = [c for c in self.columns if c.kind == KIND_LABEL]
        if len(labels) != 1:
            raise ValueError(f"schema needs exactly one label column, got {len(labels)}")
        if labels[0].dropped:
            raise ValueError("label column cannot be dropped")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names in schema")
        if not self.anomaly_classes:
            raise ValueError("anomaly_classes must be nonempty")
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(
            self, "anomaly_classes", frozenset(str(c) for c in self.anomaly_classes)
        )

    @property
    def label_column(self) -> str:
        return next(c.name for c in self.columns if c.kind == KIND_LABEL)

    @property
    def kept_feature_columns(self) -> tuple[ColumnSpec, ...]:
        return tuple(c for c in self.columns if c.kind != KIND_LABEL and not c.dropped)


@dataclass(frozen=True)
class TabularDataset:
    """Scaled feature matrix plus binary labels and provenance metadata.

    Immutable once built; safe to share across threads.  ``scale_min`` and
    ``scale_max`` are the pre-scaling per-column statistics needed to undo
    the min-max map.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    scale_min: np.ndarray | None = None
    scale_max: np.ndarray | None = None
    n_dropped_rows: int = 0

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        n, d = X.shape
        if n == 0 or d == 0:
            raise DataError("empty dataset")
        if len(y) != n:
            raise DataError(f"labels length {len(y)} != n_samples {n}")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be binary (0/1)")
        if not np.all(np.isfinite(X)):
            raise DataError("features contain missing or non-finite values")
        if X.min() < -1e-12 or X.max() > 1.0 + 1e-12:
            raise DataError("features must lie in [0, 1] after scaling")
        X = np.ascontiguousarray(X)
        X.setflags(write=False)
        y = y.astype(np.uint8)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        names = self.feature_names or tuple(f"f{i}" for i in range(d))
        if len(names) != d:
            raise DataError(f"{len(names)} feature names for {d} columns")
        object.__setattr__(self, "feature_names", tuple(names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def anomaly_ratio(self) -> float:
        return float(self.labels.sum()) / self.n_samples

    @property
    def normal_ratio(self) -> float:
        return 1.0 - self.anomaly_ratio


def column_minmax(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column (min, max) of a feature matrix."""
    X = np.asarray(X, dtype=np.float64)
    return X.min(axis=0), X.max(axis=0)


def minmax_scale(X: np.ndarray) -> np.ndarray:
    """Map each column by (x - min) / (max - min); constant columns become 0.

    One-hot columns (min 0, max 1) pass through unchanged.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        raise DataError("minmax_scale requires finite inputs")
    lo, hi = column_minmax(X)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = (X - lo) / safe
    scaled[:, span == 0] = 0.0
    return scaled


def minmax_descale(scaled: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Inverse of minmax_scale given the stored per-column statistics."""
    return np.asarray(scaled, dtype=np.float64) * (hi - lo) + lo


def map_positive_class(raw_labels, anomaly_classes) -> np.ndarray:
    """Binary anomaly indicator: 1 iff the sample's class is in the set.

    The positive class is meant to be the minority; if it is not, a warning
    is emitted and the ratio is recorded as-is.
    """
    raw = np.asarray(raw_labels)
    classes = _normalize_classes(raw)
    wanted = frozenset(str(c) for c in anomaly_classes)
    if not wanted:
        raise DataError("anomaly_classes must be nonempty")
    observed = set(classes.tolist())
    unknown = wanted - observed
    if unknown:
        raise DataError(f"anomaly classes not present in data: {sorted(unknown)}")
    if wanted >= observed:
        raise DataError("anomaly_classes cover every observed class")
    y = np.isin(classes, sorted(wanted)).astype(np.uint8)
    ratio = y.mean()
    if ratio > 0.5:
        log.warning(
            "positive class is not the minority (ratio %.4f); recording as-is", ratio
        )
    return y


def _normalize_classes(raw: np.ndarray) -> np.ndarray:
    """Class values as canonical strings (integral floats lose the '.0')."""
    if np.issubdtype(raw.dtype, np.floating) and np.all(raw == np.floor(raw)):
        raw = raw.astype(np.int64)
    return np.array([str(v).strip() for v in raw.tolist()])


def _one_hot(values: np.ndarray, column: str) -> tuple[np.ndarray, list[str]]:
    classes = _normalize_classes(values)
    categories = sorted(set(classes.tolist()))
    matrix = np.zeros((len(classes), len(categories)), dtype=np.float64)
    for j, cat in enumerate(categories):
        matrix[:, j] = classes == cat
    names = [f"{column}={cat}" for cat in categories]
    return matrix, names


def load_dataset(path, schema: DatasetSchema) -> TabularDataset:
    """Load one or more raw CSV files, preprocess, and scale.

    Steps: validate columns against the schema, drop declared columns,
    one-hot encode categoricals, collapse labels to binary per the schema's
    anomaly-class list, drop rows with missing/non-finite values (counted),
    then min-max scale everything.
    """
    paths = [Path(p) for p in (path if isinstance(path, (list, tuple)) else [path])]
    frames = []
    for p in paths:
        if not p.exists():
            raise DataError(f"dataset file not found: {p}")
        try:
            if schema.has_header:
                frame = pd.read_csv(p, skipinitialspace=True)
            else:
                frame = pd.read_csv(
                    p,
                    header=None,
                    names=[c.name for c in schema.columns],
                    skipinitialspace=True,
                )
        except pd.errors.EmptyDataError as exc:
            raise DataError(f"empty dataset: {p}") from exc
        frames.append(frame)
    df = frames[0] if len(frames) == 1 else pd.concat(frames, ignore_index=True)
    if len(df) == 0:
        raise DataError(f"empty dataset: {paths[0]}")

    declared = {c.name for c in schema.columns}
    present = set(df.columns)
    if schema.has_header:
        unknown = present - declared
        if unknown:
            raise DataError(f"columns not in schema: {sorted(unknown)}")
        missing = {c.name for c in schema.columns if not c.dropped} - present
        if missing:
            raise DataError(f"schema columns missing from file: {sorted(missing)}")
    if schema.label_column not in df.columns:
        raise DataError(f"label column {schema.label_column!r} missing")

    kept = [c for c in schema.kept_feature_columns if c.name in df.columns]
    if not kept:
        raise DataError("no feature columns left after drops")

    # Row filter: reject rows with missing values or non-finite continuous
    # entries, counting what was removed.
    valid = df[schema.label_column].notna().to_numpy()
    for col in kept:
        series = df[col.name]
        ok = series.notna().to_numpy()
        if col.kind == KIND_CONTINUOUS:
            numeric = pd.to_numeric(series, errors="coerce")
            ok &= np.isfinite(numeric.to_numpy(dtype=np.float64, na_value=np.nan))
        valid &= ok
    n_dropped = int(len(df) - valid.sum())
    if n_dropped:
        log.info("%s: dropped %d rows with missing/invalid values", schema.name, n_dropped)
    df = df.loc[valid]
    if len(df) == 0:
        raise DataError("all rows rejected as invalid")

    raw_labels = df[schema.label_column].to_numpy()
    if len(set(_normalize_classes(raw_labels).tolist())) < 2:
        raise DataError("label column has fewer than 2 distinct values")
    y = map_positive_class(raw_labels, schema.anomaly_classes)

    blocks: list[np.ndarray] = []
    names: list[str] = []
    for col in kept:
        if col.kind == KIND_CATEGORICAL:
            block, block_names = _one_hot(df[col.name].to_numpy(), col.name)
        else:
            block = pd.to_numeric(df[col.name]).to_numpy(dtype=np.float64)[:, None]
            block_names = [col.name]
        blocks.append(block)
        names.extend(block_names)
    X = np.hstack(blocks)

    lo, hi = column_minmax(X)
    return TabularDataset(
        name=schema.name,
        features=minmax_scale(X),
        labels=y,
        feature_names=tuple(names),
        scale_min=lo,
        scale_max=hi,
        n_dropped_rows=n_dropped,
    )


def load_odds_mat(path, name: str) -> TabularDataset:
    """Load an ODDS-style .mat file with 'X' features and binary 'y' labels."""
    from scipy.io import loadmat

    p = Path(path)
    if not p.exists():
        raise DataError(f"dataset file not found: {p}")
    try:
        blob = loadmat(p)
    except Exception as exc:  # loadmat raises a zoo of types
        raise DataError(f"cannot parse .mat file {p}: {exc}") from exc
    if "X" not in blob or "y" not in blob:
        raise DataError(f"{p}: expected 'X' and 'y' variables")
    X = np.asarray(blob["X"], dtype=np.float64)
    y = np.asarray(blob["y"]).ravel().astype(np.int64)
    if len(X) == 0:
        raise DataError(f"empty dataset: {p}")
    if not np.isin(y, (0, 1)).all():
        raise DataError(f"{p}: labels must already be binary")
    finite = np.all(np.isfinite(X), axis=1)
    n_dropped = int(len(X) - finite.sum())
    X, y = X[finite], y[finite]
    lo, hi = column_minmax(X)
    return TabularDataset(
        name=name,
        features=minmax_scale(X),
        labels=y,
        feature_names=tuple(f"x{i}" for i in range(X.shape[1])),
        scale_min=lo,
        scale_max=hi,
        n_dropped_rows=n_dropped,
    )


# ---------------------------------------------------------------------------
# On-disk cache: column-major binary matrix + JSON metadata sidecar.
# ---------------------------------------------------------------------------


def cache_paths(directory, name: str) -> tuple[Path, Path]:
    base = Path(directory)
    return base / f"{name}.features.bin", base / f"{name}.meta.json"


def save_cache(dataset: TabularDataset, directory) -> tuple[Path, Path]:
    """Write the dataset as a Fortran-order f64 matrix plus a JSON sidecar.

    The binary holds N x (D + 1) columns; the final column is the label
    vector.  The sidecar records shape, ratios and per-column min/max.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    bin_path, meta_path = cache_paths(directory, dataset.name)
    matrix = np.empty((dataset.n_samples, dataset.n_features + 1), dtype=np.float64)
    matrix[:, :-1] = dataset.features
    matrix[:, -1] = dataset.labels
    matrix.ravel(order="F").tofile(bin_path)
    lo = dataset.scale_min if dataset.scale_min is not None else np.zeros(dataset.n_features)
    hi = dataset.scale_max if dataset.scale_max is not None else np.ones(dataset.n_features)
    meta = {
        "format_version": CACHE_FORMAT_VERSION,
        "layout": "column_major_float64_labels_last",
        "name": dataset.name,
        "n_samples": dataset.n_samples,
        "n_features": dataset.n_features,
        "anomaly_ratio": dataset.anomaly_ratio,
        "n_dropped_rows": dataset.n_dropped_rows,
        "feature_names": list(dataset.feature_names),
        "scale_min": [float(v) for v in lo],
        "scale_max": [float(v) for v in hi],
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return bin_path, meta_path


def load_cache(directory, name: str) -> TabularDataset:
    bin_path, meta_path = cache_paths(directory, name)
    if not meta_path.exists():
        raise DataError(f"cache sidecar not found: {meta_path}")
    if not bin_path.exists():
        raise DataError(f"cache matrix not found: {bin_path}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("format_version") != CACHE_FORMAT_VERSION:
        raise DataError(f"unsupported cache version {meta.get('format_version')!r}")
    n, d = meta["n_samples"], meta["n_features"]
    raw = np.fromfile(bin_path, dtype=np.float64)
    if raw.size != n * (d + 1):
        raise DataError(
            f"cache matrix size mismatch: expected {n * (d + 1)} values, got {raw.size}"
        )
    matrix = raw.reshape((n, d + 1), order="F")
    return TabularDataset(
        name=meta["name"],
        features=matrix[:, :-1],
        labels=matrix[:, -1].astype(np.uint8),
        feature_names=tuple(meta["feature_names"]),
        scale_min=np.array(meta["scale_min"], dtype=np.float64),
        scale_max=np.array(meta["scale_max"], dtype=np.float64),
        n_dropped_rows=meta.get("n_dropped_rows", 0),
    )
