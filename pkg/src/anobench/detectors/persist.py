"""Versioned binary persistence for fitted detector models.

Layout: magic ``ANBM``, u16 format version, u16 model type, then a typed
payload of shape-prefixed row-major float64 arrays.  Enough to replay a
scoring run without retraining.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .dae import DaeConfig, DaeModel
from .lof import LofModel

MAGIC = b"ANBM"
FORMAT_VERSION = 1
TYPE_LOF = 1
TYPE_DAE = 2


def _write_array(fh, arr: np.ndarray) -> None:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    fh.write(struct.pack("<B", arr.ndim))
    fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
    fh.write(arr.tobytes(order="C"))


def _read_array(fh) -> np.ndarray:
    (ndim,) = struct.unpack("<B", fh.read(1))
    shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
    count = int(np.prod(shape)) if shape else 1
    data = np.frombuffer(fh.read(8 * count), dtype=np.float64)
    if data.size != count:
        raise DataError("model blob truncated")
    return data.reshape(shape).copy()


def save_model(model, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        if isinstance(model, LofModel):
            fh.write(struct.pack("<H", TYPE_LOF))
            fh.write(struct.pack("<I", model.k))
            for arr in (model.train, model.k_distance, model.lrd, model.train_lof):
                _write_array(fh, arr)
        elif isinstance(model, DaeModel):
            fh.write(struct.pack("<H", TYPE_DAE))
            fh.write(struct.pack("<I", len(model.weights)))
            fh.write(struct.pack("<d", float(model.final_loss)))
            fh.write(struct.pack("<I", model.config.latent_dim))
            for W, b in zip(model.weights, model.biases):
                _write_array(fh, W)
                _write_array(fh, b)
        else:
            raise DataError(f"cannot persist model of type {type(model).__name__}")
    return path


def load_model(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file not found: {path}")
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise DataError(f"{path}: bad magic bytes")
        (version,) = struct.unpack("<H", fh.read(2))
        if version != FORMAT_VERSION:
            raise DataError(f"{path}: unsupported model format version {version}")
        (model_type,) = struct.unpack("<H", fh.read(2))
        if model_type == TYPE_LOF:
            (k,) = struct.unpack("<I", fh.read(4))
            train = _read_array(fh)
            k_distance = _read_array(fh)
            lrd = _read_array(fh)
            train_lof = _read_array(fh)
            return LofModel(train, k, k_distance, lrd, train_lof)
        if model_type == TYPE_DAE:
            (n_layers,) = struct.unpack("<I", fh.read(4))
            (final_loss,) = struct.unpack("<d", fh.read(8))
            (latent_dim,) = struct.unpack("<I", fh.read(4))
            weights, biases = [], []
            for _ in range(n_layers):
                weights.append(_read_array(fh))
                biases.append(_read_array(fh))
            config = DaeConfig(latent_dim=latent_dim)
            return DaeModel(weights, biases, config, final_loss=final_loss)
        raise DataError(f"{path}: unknown model type {model_type}")
