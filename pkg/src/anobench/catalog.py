"""Built-in schemas and reference statistics for the five catalog datasets.

The raw files are not redistributable with this package; loaders look for
them under a data directory (``ANOBENCH_DATA_DIR`` or ``./data``).  Expected
layout:

    thyroid.mat                ODDS Thyroid (X: 3772x6, y binary)
    arrhythmia.mat             ODDS Arrhythmia (X: 452x274, y binary)
    kddcup.data_10_percent     KDDCUP'99 10% (41 columns + label)
    KDDTrain+.txt, KDDTest+.txt   NSL-KDD (41 columns + label + difficulty)
    cse-cic-ids2018.csv        CSE-CIC-IDS2018 processed flow export
"""

from __future__ import annotations

import os
from pathlib import Path

from .data import (
    ColumnSpec,
    DatasetSchema,
    KIND_CATEGORICAL,
    KIND_CONTINUOUS,
    KIND_LABEL,
    TabularDataset,
    load_dataset,
    load_odds_mat,
)
from .errors import DataError

DATA_DIR_ENV = "ANOBENCH_DATA_DIR"

# Reference catalog statistics: name -> (n_samples, raw feature count, rho).
# Raw feature count excludes the label column (the published table counts
# columns inconsistently across datasets; these are the on-disk counts).
EXPECTED_STATS = {
    "thyroid": (3772, 6, 0.0246),
    "arrhythmia": (452, 274, 0.1460),
    "kddcup10": (494021, 41, 0.1969),
    "nsl-kdd": (148517, 41, 0.4811),
    "ids2018": (16232944, 80, 0.1693),
}

# Per-dataset detector settings from the benchmark's hyperparameter tables.
LOF_NEIGHBORS = {
    "arrhythmia": 50,
    "thyroid": 20,
    "kddcup10": 100,
    "nsl-kdd": 20,
    "ids2018": 15,
}
LOF_THRESHOLD_PERCENTILE = {
    "arrhythmia": 75,
    "thyroid": 96,
    "kddcup10": 77,
    "nsl-kdd": 44,
    "ids2018": 88,
}
OCSVM_NU = {
    "arrhythmia": 0.40,
    "thyroid": 0.05,
    "kddcup10": 0.25,
    "nsl-kdd": 0.40,
    "ids2018": 0.01,
}
OCSVM_THRESHOLD_PERCENTILE = {
    "arrhythmia": 73,
    "thyroid": 97,
    "kddcup10": 78,
    "nsl-kdd": 46,
    "ids2018": 86,
}
DAE_SETTINGS = {
    "arrhythmia": {"latent_dim": 3, "epochs": 10000, "batch_size": 128},
    "thyroid": {"latent_dim": 2, "epochs": 5000, "batch_size": 128},
    "kddcup10": {"latent_dim": 2, "epochs": 100, "batch_size": 1024},
    "nsl-kdd": {"latent_dim": 2, "epochs": 100, "batch_size": 1024},
    "ids2018": {"latent_dim": 2, "epochs": 100, "batch_size": 1024},
}

_KDD_COLUMNS = [
    ("duration", KIND_CONTINUOUS),
    ("protocol_type", KIND_CATEGORICAL),
    ("service", KIND_CATEGORICAL),
    ("flag", KIND_CATEGORICAL),
    ("src_bytes", KIND_CONTINUOUS),
    ("dst_bytes", KIND_CONTINUOUS),
    ("land", KIND_CATEGORICAL),
    ("wrong_fragment", KIND_CONTINUOUS),
    ("urgent", KIND_CONTINUOUS),
    ("hot", KIND_CONTINUOUS),
    ("num_failed_logins", KIND_CONTINUOUS),
    ("logged_in", KIND_CATEGORICAL),
    ("num_compromised", KIND_CONTINUOUS),
    ("root_shell", KIND_CONTINUOUS),
    ("su_attempted", KIND_CONTINUOUS),
    ("num_root", KIND_CONTINUOUS),
    ("num_file_creations", KIND_CONTINUOUS),
    ("num_shells", KIND_CONTINUOUS),
    ("num_access_files", KIND_CONTINUOUS),
    ("num_outbound_cmds", KIND_CONTINUOUS),
    ("is_host_login", KIND_CATEGORICAL),
    ("is_guest_login", KIND_CATEGORICAL),
    ("count", KIND_CONTINUOUS),
    ("srv_count", KIND_CONTINUOUS),
    ("serror_rate", KIND_CONTINUOUS),
    ("srv_serror_rate", KIND_CONTINUOUS),
    ("rerror_rate", KIND_CONTINUOUS),
    ("srv_rerror_rate", KIND_CONTINUOUS),
    ("same_srv_rate", KIND_CONTINUOUS),
    ("diff_srv_rate", KIND_CONTINUOUS),
    ("srv_diff_host_rate", KIND_CONTINUOUS),
    ("dst_host_count", KIND_CONTINUOUS),
    ("dst_host_srv_count", KIND_CONTINUOUS),
    ("dst_host_same_srv_rate", KIND_CONTINUOUS),
    ("dst_host_diff_srv_rate", KIND_CONTINUOUS),
    ("dst_host_same_src_port_rate", KIND_CONTINUOUS),
    ("dst_host_srv_diff_host_rate", KIND_CONTINUOUS),
    ("dst_host_serror_rate", KIND_CONTINUOUS),
    ("dst_host_srv_serror_rate", KIND_CONTINUOUS),
    ("dst_host_rerror_rate", KIND_CONTINUOUS),
    ("dst_host_srv_rerror_rate", KIND_CONTINUOUS),
]


def _kdd_schema(name: str, drops: set[str], extra: list[tuple[str, str]] = ()):
    columns = [
        ColumnSpec(col, kind, dropped=col in drops) for col, kind in _KDD_COLUMNS
    ]
    columns.append(ColumnSpec("label", KIND_LABEL))
    for col, kind in extra:
        columns.append(ColumnSpec(col, kind, dropped=True))
    # Attack subclasses vary between files; normal traffic is the single
    # non-anomalous class, declared via the complement at load time.
    return DatasetSchema(
        name=name,
        columns=tuple(columns),
        anomaly_classes=frozenset({"__attack__"}),  # placeholder, see loader
        has_header=False,
    )


def kddcup10_schema() -> DatasetSchema:
    return _kdd_schema("kddcup10", drops={"num_outbound_cmds", "is_host_login"})


def nsl_kdd_schema() -> DatasetSchema:
    # is_host_login is kept here (it has more than one value); the trailing
    # difficulty column is dropped.
    return _kdd_schema(
        "nsl-kdd",
        drops={"num_outbound_cmds"},
        extra=[("difficulty", KIND_CONTINUOUS)],
    )


KDD_NORMAL_CLASSES = frozenset({"normal", "normal."})
IDS2018_NORMAL_CLASSES = frozenset({"Benign", "BENIGN"})


def data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def complement_anomaly_classes(raw_label_values, normal_classes) -> frozenset[str]:
    """Anomaly-class set declared as the complement of the normal classes."""
    observed = {str(v).strip() for v in raw_label_values}
    normal = {str(v) for v in normal_classes}
    anomalies = observed - normal
    if not anomalies:
        raise DataError("no anomaly classes left after removing normal classes")
    if anomalies == observed:
        raise DataError(f"none of the declared normal classes {sorted(normal)} observed")
    return frozenset(anomalies)


def load_catalog_dataset(name: str, base_dir=None, paths=None) -> TabularDataset:
    """Load one of the five catalog datasets from a data directory."""
    import pandas as pd

    base = Path(base_dir) if base_dir is not None else data_dir()
    if name == "thyroid":
        return load_odds_mat(paths or base / "thyroid.mat", "thyroid")
    if name == "arrhythmia":
        return load_odds_mat(paths or base / "arrhythmia.mat", "arrhythmia")
    if name == "kddcup10":
        # Attacks dominate this capture (~80% of rows), so the minority,
        # positive class is the normal traffic; rho = 0.1969 counts it.
        path = paths or base / "kddcup.data_10_percent"
        schema = kddcup10_schema()
        observed = _observed_labels(schema, path)
        schema = DatasetSchema(
            name=schema.name,
            columns=schema.columns,
            anomaly_classes=frozenset(observed & KDD_NORMAL_CLASSES),
            has_header=False,
        )
        return load_dataset(path, schema)
    if name == "nsl-kdd":
        path = paths or [base / "KDDTrain+.txt", base / "KDDTest+.txt"]
        schema = _resolve_kdd_anomalies(nsl_kdd_schema(), path)
        return load_dataset(path, schema)
    if name == "ids2018":
        path = paths or base / "cse-cic-ids2018.csv"
        frame = pd.read_csv(path, usecols=["Label"])
        anomalies = complement_anomaly_classes(
            frame["Label"].unique(), IDS2018_NORMAL_CLASSES
        )
        columns = _sniff_csv_schema(path, label="Label")
        schema = DatasetSchema(
            name="ids2018",
            columns=columns,
            anomaly_classes=anomalies,
            has_header=True,
        )
        return load_dataset(path, schema)
    raise DataError(f"unknown catalog dataset {name!r}; known: {sorted(EXPECTED_STATS)}")


def _observed_labels(schema: DatasetSchema, path) -> set[str]:
    import pandas as pd

    paths = path if isinstance(path, (list, tuple)) else [path]
    label_pos = [c.name for c in schema.columns].index("label")
    observed: set[str] = set()
    for p in paths:
        if not Path(p).exists():
            raise DataError(f"dataset file not found: {p}")
        col = pd.read_csv(p, header=None, usecols=[label_pos], skipinitialspace=True)
        observed.update(str(v).strip() for v in col[label_pos].unique())
    return observed


def _resolve_kdd_anomalies(schema: DatasetSchema, path) -> DatasetSchema:
    anomalies = complement_anomaly_classes(_observed_labels(schema, path), KDD_NORMAL_CLASSES)
    return DatasetSchema(
        name=schema.name,
        columns=schema.columns,
        anomaly_classes=anomalies,
        has_header=False,
    )


def _sniff_csv_schema(path, label: str) -> tuple[ColumnSpec, ...]:
    """Schema for a headered flow CSV: numeric columns kept, the rest dropped."""
    import pandas as pd

    sample = pd.read_csv(path, nrows=2000)
    columns = []
    for col in sample.columns:
        if col == label:
            columns.append(ColumnSpec(col, KIND_LABEL))
        elif pd.api.types.is_numeric_dtype(sample[col]):
            columns.append(ColumnSpec(col, KIND_CONTINUOUS))
        else:
            columns.append(ColumnSpec(col, KIND_CONTINUOUS, dropped=True))
    return tuple(columns)
