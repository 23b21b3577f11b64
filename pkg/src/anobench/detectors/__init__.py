"""Native detectors and the fit-on-normals / score-test interface.

Both detectors emit scores in the canonical orientation (higher is more
anomalous).  Training only ever sees a feature matrix; labels do not exist
on this interface.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from ..errors import ConfigError, DetectorError
from .dae import DaeConfig, DaeModel, dae_score, dae_train
from .lof import LofModel, lof_fit, lof_score
from .persist import load_model, save_model

__all__ = [
    "DaeConfig",
    "DaeModel",
    "LofModel",
    "available_detectors",
    "build_detector",
    "dae_score",
    "dae_train",
    "load_model",
    "lof_fit",
    "lof_score",
    "save_model",
]


class LofDetector:
    """k-NN density-ratio detector; deterministic, ignores the run seed."""

    name = "lof"

    def __init__(self, k: int = 20):
        self.k = int(k)
        self.model: LofModel | None = None

    def fit(self, X: np.ndarray, seed: int = 0) -> "LofDetector":
        self.model = lof_fit(X, self.k)
        return self

    def score(self, X: np.ndarray) -> np.ndarray:
        if self.model is None:
            raise DetectorError("fit must be called before score")
        return lof_score(self.model, X)


class DaeDetector:
    """Reconstruction-error detector around the trainable autoencoder."""

    name = "dae"

    def __init__(self, **params):
        try:
            self.config = DaeConfig(**params)
        except TypeError as exc:
            raise ConfigError(f"bad dae parameters: {exc}") from exc
        self.model: DaeModel | None = None

    def fit(self, X: np.ndarray, seed: int = 0) -> "DaeDetector":
        config = dataclasses.replace(self.config, seed=seed)
        self.model = dae_train(X, config)
        return self

    def score(self, X: np.ndarray) -> np.ndarray:
        if self.model is None:
            raise DetectorError("fit must be called before score")
        return dae_score(self.model, X)


_REGISTRY = {"lof": LofDetector, "dae": DaeDetector}


def available_detectors() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def build_detector(name: str, params: dict | None = None):
    """Instantiate a registered detector from config-style parameters."""
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown detector {name!r}; available: {', '.join(available_detectors())}"
        )
    params = dict(params or {})
    cls = _REGISTRY[name]
    if cls is LofDetector:
        allowed = {"k"}
        unknown = set(params) - allowed
        if unknown:
            raise ConfigError(f"unknown lof parameters: {sorted(unknown)}")
        return LofDetector(**params)
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name!r}: {exc}") from exc
