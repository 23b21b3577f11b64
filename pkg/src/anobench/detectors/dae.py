"""Deep autoencoder scored by per-sample squared reconstruction error.

Mirrored encoder/decoder with a geometric taper (D -> ceil(D/2) ->
ceil(D/4) -> latent by default; the taper is overridable through config
since only the latent width is externally fixed).  Rectifier on hidden
layers, identity output, trained with Adam on mean squared error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DetectorError
from . import autograd as ag

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DaeConfig:
    latent_dim: int
    hidden_dims: tuple[int, ...] | None = None
    epochs: int = 100
    batch_size: int = 128
    learning_rate: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    early_stopping: bool = False
    patience: int = 100

    def layer_dims(self, n_features: int) -> list[int]:
        if self.latent_dim >= n_features:
            raise DetectorError(
                f"latent_dim {self.latent_dim} must be < n_features {n_features}"
            )
        hidden = self.hidden_dims
        if hidden is None:
            hidden = (int(np.ceil(n_features / 2)), int(np.ceil(n_features / 4)))
        hidden = tuple(int(h) for h in hidden if int(h) > 0)
        encoder = [n_features, *hidden, self.latent_dim]
        decoder = [*reversed(hidden), n_features]
        return encoder + decoder


class DaeModel:
    """Trained weights plus the config that produced them."""

    def __init__(
        self,
        weights,
        biases,
        config: DaeConfig,
        final_loss: float = np.nan,
        epochs_run: int = 0,
    ):
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.config = config
        self.final_loss = final_loss
        self.epochs_run = epochs_run

    @property
    def n_features(self) -> int:
        return self.weights[0].shape[0]

    def reconstruct(self, X: np.ndarray) -> np.ndarray:
        h = np.asarray(X, dtype=np.float64)
        last = len(self.weights) - 1
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ W + b
            if i != last:
                h = np.maximum(h, 0.0)
        return h


def _init_layers(dims: list[int], seed: int):
    """Glorot-uniform weights, zero biases, seeded."""
    gen = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(gen.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward_loss(params: list[ag.Tensor], batch: np.ndarray) -> ag.Tensor:
    """Reconstruction MSE of the batch; params alternate weight, bias."""
    h = ag.Tensor(batch)
    n_layers = len(params) // 2
    for i in range(n_layers):
        h = ag.add_bias(ag.matmul(h, params[2 * i]), params[2 * i + 1])
        if i != n_layers - 1:
            h = ag.relu(h)
    return ag.mse(h, batch)


def dae_train(train: np.ndarray, config: DaeConfig) -> DaeModel:
    """Seeded mini-batch Adam on mean squared reconstruction error."""
    X = np.asarray(train, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise DetectorError("training matrix must be non-empty and 2-D")
    n, d = X.shape
    dims = config.layer_dims(d)
    weights, biases = _init_layers(dims, config.seed)
    params = []
    for W, b in zip(weights, biases):
        params.extend([ag.Tensor(W), ag.Tensor(b)])

    m_state = [np.zeros_like(p.value) for p in params]
    v_state = [np.zeros_like(p.value) for p in params]
    t = 0
    lr, b1, b2, eps = config.learning_rate, config.beta1, config.beta2, config.adam_eps
    shuffler = np.random.Generator(np.random.PCG64(config.seed ^ 0x5EED))

    batch = max(1, min(config.batch_size, n))
    best_loss, stale = np.inf, 0
    epoch_loss = np.nan
    epochs_run = 0
    for epoch in range(config.epochs):
        epochs_run = epoch + 1
        order = shuffler.permutation(n)
        losses = []
        for start in range(0, n, batch):
            rows = X[order[start : start + batch]]
            loss = _forward_loss(params, rows)
            if not np.isfinite(loss.value):
                raise DetectorError(
                    f"non-finite loss {loss.value} at epoch {epoch}, "
                    f"batch starting {start}"
                )
            loss.backward()
            t += 1
            for i, p in enumerate(params):
                g = p.grad
                m_state[i] = b1 * m_state[i] + (1 - b1) * g
                v_state[i] = b2 * v_state[i] + (1 - b2) * g * g
                m_hat = m_state[i] / (1 - b1**t)
                v_hat = v_state[i] / (1 - b2**t)
                p.value -= lr * m_hat / (np.sqrt(v_hat) + eps)
            losses.append(float(loss.value) * rows.size)
        epoch_loss = sum(losses) / (n * d)
        if config.early_stopping:
            if epoch_loss < best_loss * (1 - 1e-6):
                best_loss, stale = epoch_loss, 0
            else:
                stale += 1
                if stale >= config.patience:
                    log.info("early stop at epoch %d (loss %.3e)", epoch, epoch_loss)
                    break

    for p in params:
        if not np.all(np.isfinite(p.value)):
            raise DetectorError("non-finite weights after training")
    trained_w = [params[2 * i].value for i in range(len(params) // 2)]
    trained_b = [params[2 * i + 1].value for i in range(len(params) // 2)]
    return DaeModel(
        trained_w, trained_b, config, final_loss=epoch_loss, epochs_run=epochs_run
    )


def dae_score(model: DaeModel, test: np.ndarray) -> np.ndarray:
    """Per-sample squared reconstruction error; higher is more anomalous."""
    X = np.asarray(test, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DetectorError(
            f"test matrix must be 2-D with {model.n_features} columns, "
            f"got shape {X.shape}"
        )
    recon = model.reconstruct(X)
    return np.sum((X - recon) ** 2, axis=1)
