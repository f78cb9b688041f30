"""Single-bottleneck autoencoder trained with seeded mini-batch gradient
descent.

One encoder layer (identity or sigmoid activation) and one linear decoder
layer, mean squared reconstruction error, no momentum. Everything is
plain float64 numpy so the analytic gradients can be checked against
finite differences, and training is bit-reproducible from the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .matrix import CoocMatrix, concept_embeddings

ACTIVATIONS = ("identity", "sigmoid")

MODEL_FORMAT = "conceptmine-autoencoder-v1"


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during training."""


@dataclass(frozen=True)
class AEConfig:
    input_dim: int
    encoded_dim: int
    learning_rate: float = 0.01
    epochs: int = 500
    batch_size: int = 32
    seed: int = 0
    activation: str = "identity"

    def __post_init__(self) -> None:
        if self.encoded_dim <= 0 or self.input_dim <= 0:
            raise ValueError("dimensions must be positive")
        if self.encoded_dim >= self.input_dim:
            raise ValueError(
                f"encoded_dim {self.encoded_dim} must be smaller than "
                f"input_dim {self.input_dim}"
            )
        # learning_rate 0 is valid: updates become no-ops.
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")


@dataclass(frozen=True, eq=False)
class AEModel:
    W_enc: np.ndarray
    b_enc: np.ndarray
    W_dec: np.ndarray
    b_dec: np.ndarray
    activation: str

    @property
    def input_dim(self) -> int:
        return self.W_enc.shape[1]

    @property
    def encoded_dim(self) -> int:
        return self.W_enc.shape[0]


@dataclass(frozen=True, eq=False)
class AEGradients:
    W_enc: np.ndarray
    b_enc: np.ndarray
    W_dec: np.ndarray
    b_dec: np.ndarray


@dataclass(frozen=True)
class TrainReport:
    loss_per_epoch: tuple[float, ...]
    final_loss: float
    seed: int


def init_model(config: AEConfig) -> AEModel:
    """Deterministic uniform(-s, s) weight init with s = sqrt(6/(m+k)),
    zero biases."""
    rng = np.random.default_rng(config.seed)
    scale = math.sqrt(6.0 / (config.input_dim + config.encoded_dim))
    return AEModel(
        W_enc=rng.uniform(-scale, scale, size=(config.encoded_dim, config.input_dim)),
        b_enc=np.zeros(config.encoded_dim),
        W_dec=rng.uniform(-scale, scale, size=(config.input_dim, config.encoded_dim)),
        b_dec=np.zeros(config.input_dim),
        activation=config.activation,
    )


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == "identity":
        return z
    if activation == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    raise ValueError(f"unknown activation {activation!r}")


def forward(model: AEModel, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Encode one vector and reconstruct it (decoder output is linear)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.input_dim:
        raise ValueError(
            f"input shape {x.shape} does not match input_dim {model.input_dim}"
        )
    encoded, reconstructed = forward_all(model, x[np.newaxis, :])
    return encoded[0], reconstructed[0]


def forward_all(model: AEModel, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched forward pass over rows of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ValueError(
            f"batch shape {X.shape} does not match input_dim {model.input_dim}"
        )
    encoded = _activate(X @ model.W_enc.T + model.b_enc, model.activation)
    reconstructed = encoded @ model.W_dec.T + model.b_dec
    return encoded, reconstructed


def _as_batch(batch: Sequence[np.ndarray] | np.ndarray, input_dim: int) -> np.ndarray:
    X = np.asarray(batch, dtype=np.float64)
    if X.ndim == 1 and X.size == 0:
        raise ValueError("batch is empty")
    X = np.atleast_2d(X)
    if X.shape[0] == 0:
        raise ValueError("batch is empty")
    if X.shape[1] != input_dim:
        raise ValueError(
            f"batch dimension {X.shape[1]} does not match input_dim {input_dim}"
        )
    return X


def loss_and_gradients(
    model: AEModel, batch: Sequence[np.ndarray] | np.ndarray
) -> tuple[float, AEGradients]:
    """Mean squared reconstruction error over the batch and its exact
    backpropagation gradients.

    Loss is the batch mean of (1/m) * sum_j (reconstructed_j - x_j)^2.
    """
    X = _as_batch(batch, model.input_dim)
    n, m = X.shape
    # Overflow to inf is the divergence signal train() detects; do not warn.
    with np.errstate(over="ignore", invalid="ignore"):
        encoded, reconstructed = forward_all(model, X)
        residual = reconstructed - X
        loss = float(np.sum(residual * residual)) / (n * m)

        d_recon = (2.0 / (n * m)) * residual
        grad_W_dec = d_recon.T @ encoded
        grad_b_dec = d_recon.sum(axis=0)
        d_encoded = d_recon @ model.W_dec
        if model.activation == "sigmoid":
            d_pre = d_encoded * encoded * (1.0 - encoded)
        else:
            d_pre = d_encoded
        grad_W_enc = d_pre.T @ X
        grad_b_enc = d_pre.sum(axis=0)
    return loss, AEGradients(
        W_enc=grad_W_enc, b_enc=grad_b_enc, W_dec=grad_W_dec, b_dec=grad_b_dec
    )


def train(
    model: AEModel, data: Sequence[np.ndarray] | np.ndarray, config: AEConfig
) -> tuple[AEModel, TrainReport]:
    """Seeded shuffled mini-batch gradient descent.

    Per-epoch losses are the pre-update training losses averaged over the
    epoch's batches (weighted by batch size). Raises
    :class:`TrainingDiverged` naming the epoch if the loss goes
    non-finite.
    """
    X = _as_batch(data, model.input_dim)
    n = X.shape[0]
    rng = np.random.default_rng(config.seed)
    W_enc = model.W_enc.copy()
    b_enc = model.b_enc.copy()
    W_dec = model.W_dec.copy()
    b_dec = model.b_dec.copy()
    lr = config.learning_rate
    losses: list[float] = []

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        epoch_sse = 0.0
        current = AEModel(
            W_enc=W_enc, b_enc=b_enc, W_dec=W_dec, b_dec=b_dec,
            activation=model.activation,
        )
        for lo in range(0, n, config.batch_size):
            rows = order[lo : lo + config.batch_size]
            loss, grads = loss_and_gradients(current, X[rows])
            if not math.isfinite(loss):
                raise TrainingDiverged(f"non-finite loss in epoch {epoch}")
            epoch_sse += loss * len(rows)
            W_enc -= lr * grads.W_enc
            b_enc -= lr * grads.b_enc
            W_dec -= lr * grads.W_dec
            b_dec -= lr * grads.b_dec
        losses.append(epoch_sse / n)

    trained = AEModel(
        W_enc=W_enc, b_enc=b_enc, W_dec=W_dec, b_dec=b_dec,
        activation=model.activation,
    )
    return trained, TrainReport(
        loss_per_epoch=tuple(losses), final_loss=losses[-1], seed=config.seed
    )


def encode_all(
    model: AEModel, C: CoocMatrix, normalized: bool = False
) -> np.ndarray:
    """Encoded vector of every (optionally L2-normalized) co-occurrence
    row, in concept order; shape (m, k)."""
    if model.input_dim != C.m_concepts:
        raise ValueError(
            f"model input_dim {model.input_dim} does not match "
            f"{C.m_concepts} concepts"
        )
    rows = concept_embeddings(C, normalized=normalized)
    encoded, _ = forward_all(model, rows)
    return encoded


def save_model(model: AEModel, path: str | Path, seed: int | None = None) -> None:
    """JSON model file; parameter floats round-trip bit-exactly."""
    record = {
        "format": MODEL_FORMAT,
        "input_dim": model.input_dim,
        "encoded_dim": model.encoded_dim,
        "activation": model.activation,
        "seed": seed,
        "w_enc": model.W_enc.tolist(),
        "b_enc": model.b_enc.tolist(),
        "w_dec": model.W_dec.tolist(),
        "b_dec": model.b_dec.tolist(),
    }
    Path(path).write_text(json.dumps(record, indent=1) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> AEModel:
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    if record.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a {MODEL_FORMAT} file")
    model = AEModel(
        W_enc=np.asarray(record["w_enc"], dtype=np.float64),
        b_enc=np.asarray(record["b_enc"], dtype=np.float64),
        W_dec=np.asarray(record["w_dec"], dtype=np.float64),
        b_dec=np.asarray(record["b_dec"], dtype=np.float64),
        activation=record["activation"],
    )
    if model.W_enc.shape != (record["encoded_dim"], record["input_dim"]):
        raise ValueError(f"{path}: parameter shapes disagree with header")
    return model
