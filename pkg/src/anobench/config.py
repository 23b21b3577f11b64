"""Key-value configuration files for datasets and experiments.

Dataset configs have a single ``[dataset]`` section describing the raw file
and its schema; experiment configs hold one experiment per section.  Unknown
keys are rejected rather than ignored.  ``${data_dir}`` inside path values
expands to the resolved data directory.
"""

from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog, metrics, splits
from .data import (
    ColumnSpec,
    DatasetSchema,
    KIND_CATEGORICAL,
    KIND_CONTINUOUS,
    KIND_LABEL,
    TabularDataset,
    load_cache,
    load_dataset,
    load_odds_mat,
)
from .engine import ExperimentSpec
from .errors import ConfigError, DataError

log = logging.getLogger(__name__)

DATASET_KEYS = {
    "name", "format", "path", "label_column", "anomaly_classes", "normal_classes",
    "categorical_columns", "drop_columns", "has_header", "columns", "catalog",
    "cache_dir",
}
DATASET_FORMATS = ("csv", "odds_mat", "cache", "catalog")

EXPERIMENT_KEYS = {
    "dataset", "detector", "runs", "threshold", "positive_class", "scores",
    "split.strategy", "split.seed", "split.normal_train_fraction",
    "split.corruption_ratio", "split.reshuffle_each_run",
}
DETECTOR_PARAM_PREFIX = "detector."

THRESHOLD_ALIASES = {
    "optimal": metrics.POLICY_OPTIMAL_F1,
    "optimal_f1": metrics.POLICY_OPTIMAL_F1,
    "percentile": metrics.POLICY_PERCENTILE,
}

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def resolve_data_dir(cli_value: str | None = None) -> Path:
    if cli_value:
        return Path(cli_value)
    return Path(os.environ.get(catalog.DATA_DIR_ENV, "data"))


def read_config(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not parser.sections():
        raise ConfigError(f"{path}: no sections")
    return parser


def apply_overrides(parser: configparser.ConfigParser, overrides) -> None:
    """Apply repeatable ``section.key=value`` command-line overrides."""
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        target, value = item.split("=", 1)
        if "." not in target:
            raise ConfigError(f"override must name a section: {item!r}")
        section, key = target.split(".", 1)
        if not parser.has_section(section):
            raise ConfigError(f"override names unknown section {section!r}")
        parser.set(section, key, value)


def _parse_bool(value: str, key: str) -> bool:
    try:
        return _BOOL[value.strip().lower()]
    except KeyError:
        raise ConfigError(f"{key}: expected a boolean, got {value!r}") from None


def _split_list(value: str) -> list[str]:
    return [item.strip() for item in value.replace(",", " ").split() if item.strip()]


@dataclass
class DatasetConfig:
    name: str
    format: str
    path: list[str] = field(default_factory=list)
    label_column: str = "label"
    anomaly_classes: list[str] = field(default_factory=list)
    normal_classes: list[str] = field(default_factory=list)
    categorical_columns: list[str] = field(default_factory=list)
    drop_columns: list[str] = field(default_factory=list)
    has_header: bool = True
    columns: list[str] = field(default_factory=list)
    catalog_name: str = ""
    cache_dir: str = ""

    def resolve_paths(self, data_dir: Path) -> list[Path]:
        return [Path(str(p).replace("${data_dir}", str(data_dir))) for p in self.path]

    def load(self, data_dir: Path) -> TabularDataset:
        if self.format == "catalog":
            return catalog.load_catalog_dataset(self.catalog_name or self.name, data_dir)
        if self.format == "cache":
            directory = self.cache_dir.replace("${data_dir}", str(data_dir)) or data_dir
            return load_cache(directory, self.name)
        paths = self.resolve_paths(data_dir)
        if not paths:
            raise ConfigError(f"dataset {self.name!r}: path is required")
        if self.format == "odds_mat":
            return load_odds_mat(paths[0], self.name)
        schema = self._csv_schema(paths)
        return load_dataset(paths if len(paths) > 1 else paths[0], schema)

    def _csv_schema(self, paths: list[Path]) -> DatasetSchema:
        import pandas as pd

        if self.columns:
            names = self.columns
        elif self.has_header:
            first = paths[0]
            if not first.exists():
                raise DataError(f"dataset file not found: {first}")
            names = list(pd.read_csv(first, nrows=0).columns)
        else:
            raise ConfigError(
                f"dataset {self.name!r}: headerless files need an explicit 'columns' list"
            )
        if self.label_column not in names:
            raise DataError(
                f"label column {self.label_column!r} not among columns of {self.name!r}"
            )
        specs = []
        for col in names:
            if col == self.label_column:
                specs.append(ColumnSpec(col, KIND_LABEL))
            else:
                kind = (
                    KIND_CATEGORICAL if col in self.categorical_columns else KIND_CONTINUOUS
                )
                specs.append(ColumnSpec(col, kind, dropped=col in self.drop_columns))
        anomaly = self.anomaly_classes
        if not anomaly:
            label_pos = names.index(self.label_column)
            observed: set[str] = set()
            for p in paths:
                if not p.exists():
                    raise DataError(f"dataset file not found: {p}")
                col = pd.read_csv(
                    p,
                    header=0 if self.has_header else None,
                    usecols=[self.label_column if self.has_header else label_pos],
                    skipinitialspace=True,
                )
                observed.update(str(v).strip() for v in col.iloc[:, 0].unique())
            anomaly = sorted(
                catalog.complement_anomaly_classes(observed, self.normal_classes)
            )
        return DatasetSchema(
            name=self.name,
            columns=tuple(specs),
            anomaly_classes=frozenset(anomaly),
            has_header=self.has_header,
        )


def parse_dataset_config(parser: configparser.ConfigParser, origin="config") -> DatasetConfig:
    if not parser.has_section("dataset"):
        raise ConfigError(f"{origin}: missing [dataset] section")
    section = parser["dataset"]
    unknown = set(section) - DATASET_KEYS
    if unknown:
        raise ConfigError(f"{origin}: unknown dataset keys: {sorted(unknown)}")
    fmt = section.get("format", "csv").strip()
    if fmt not in DATASET_FORMATS:
        raise ConfigError(f"{origin}: unknown format {fmt!r}; expected {DATASET_FORMATS}")
    name = section.get("name", "").strip()
    if not name:
        raise ConfigError(f"{origin}: dataset name is required")
    cfg = DatasetConfig(
        name=name,
        format=fmt,
        path=_split_list(section.get("path", "")),
        label_column=section.get("label_column", "label").strip(),
        anomaly_classes=_split_list(section.get("anomaly_classes", "")),
        normal_classes=_split_list(section.get("normal_classes", "")),
        categorical_columns=_split_list(section.get("categorical_columns", "")),
        drop_columns=_split_list(section.get("drop_columns", "")),
        has_header=_parse_bool(section.get("has_header", "true"), "has_header"),
        columns=_split_list(section.get("columns", "")),
        catalog_name=section.get("catalog", "").strip(),
        cache_dir=section.get("cache_dir", "").strip(),
    )
    if cfg.format == "csv" and cfg.anomaly_classes and cfg.normal_classes:
        raise ConfigError(
            f"{origin}: declare either anomaly_classes or normal_classes, not both"
        )
    return cfg


@dataclass
class ExperimentConfig:
    spec: ExperimentSpec
    dataset_ref: str  # path to a dataset config, or "cache:<dir>:<name>"

    def load_dataset(self, data_dir: Path) -> TabularDataset:
        ref = self.dataset_ref.replace("${data_dir}", str(data_dir))
        if ref.startswith("cache:"):
            _, directory, name = ref.split(":", 2)
            return load_cache(directory or data_dir, name)
        parser = read_config(ref)
        return parse_dataset_config(parser, origin=ref).load(data_dir)


def parse_experiment_configs(
    parser: configparser.ConfigParser, origin="config"
) -> list[ExperimentConfig]:
    experiments = []
    for section_name in parser.sections():
        section = parser[section_name]
        detector_params = {}
        plain_keys = set()
        for key in section:
            if key.startswith(DETECTOR_PARAM_PREFIX):
                detector_params[key[len(DETECTOR_PARAM_PREFIX):]] = section[key]
            else:
                plain_keys.add(key)
        unknown = plain_keys - EXPERIMENT_KEYS
        if unknown:
            raise ConfigError(
                f"{origin}: [{section_name}] unknown keys: {sorted(unknown)}"
            )
        if "dataset" not in section:
            raise ConfigError(f"{origin}: [{section_name}] needs a dataset")
        detector = section.get("detector", "").strip()
        scores = section.get("scores", "").strip()
        if scores:
            if detector:
                raise ConfigError(
                    f"{origin}: [{section_name}] declare detector or scores, not both"
                )
            detector = f"scores:{scores}"
        if not detector:
            raise ConfigError(f"{origin}: [{section_name}] needs a detector")

        try:
            split_spec = splits.SplitSpec(
                strategy=section.get("split.strategy", splits.STRATEGY_PROPOSED).strip(),
                seed=int(section.get("split.seed", "0")),
                normal_train_fraction=float(
                    section.get("split.normal_train_fraction", "0.5")
                ),
                corruption_ratio=float(section.get("split.corruption_ratio", "0")),
                reshuffle_each_run=_parse_bool(
                    section.get("split.reshuffle_each_run", "false"),
                    "split.reshuffle_each_run",
                ),
            )
            policy_raw = section.get("threshold", "optimal_f1").strip().lower()
            if policy_raw not in THRESHOLD_ALIASES:
                raise ConfigError(
                    f"{origin}: [{section_name}] unknown threshold {policy_raw!r}"
                )
            spec = ExperimentSpec(
                name=section_name,
                detector=detector,
                split=split_spec,
                detector_params=_coerce_params(detector_params),
                n_runs=int(section.get("runs", "20")),
                threshold_policy=THRESHOLD_ALIASES[policy_raw],
                positive_class=section.get("positive_class", metrics.MINORITY).strip(),
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{origin}: [{section_name}] {exc}") from exc
        experiments.append(
            ExperimentConfig(spec=spec, dataset_ref=section["dataset"].strip())
        )
    if not experiments:
        raise ConfigError(f"{origin}: no experiment sections")
    return experiments


def _coerce_params(params: dict[str, str]) -> dict:
    """Best-effort typing of detector parameters: int, float, bool, str."""
    out = {}
    for key, value in params.items():
        text = value.strip()
        lowered = text.lower()
        if lowered in _BOOL:
            out[key] = _BOOL[lowered]
            continue
        try:
            out[key] = int(text)
            continue
        except ValueError:
            pass
        try:
            out[key] = float(text)
            continue
        except ValueError:
            pass
        out[key] = text
    return out


def render_resolved(parser: configparser.ConfigParser) -> str:
    """Canonical text of the effective configuration, for audit trails."""
    lines = []
    for section in parser.sections():
        lines.append(f"[{section}]")
        for key in sorted(parser[section]):
            lines.append(f"{key} = {parser[section][key]}")
        lines.append("")
    return "\n".join(lines)
