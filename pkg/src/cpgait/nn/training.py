"""Seeded, deterministic training loop for the gait classifier."""

from __future__ import annotations

import collections
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from .adam import AdamState, adam_step
from .network import (
    ModelConfig,
    ModelParams,
    forward,
    init_params,
    loss_and_gradients_cached,
)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    batch_size: int = 16
    epochs: int = 100
    seed: int = 0
    validation_fraction: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 1.0:
            raise InvalidInputError("validation fraction must be in (0, 1)")
        if self.batch_size < 1:
            raise InvalidInputError("batch size must be >= 1")
        if self.epochs < 1:
            raise InvalidInputError("epochs must be >= 1")


@dataclass
class TrainHistory:
    """Per-epoch metrics plus the validation split used."""

    train_loss: list[float] = field(default_factory=list)
    train_accuracy: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    val_indices: list[int] = field(default_factory=list)


def _stratified_split(labels: np.ndarray, fraction: float, rng: np.random.Generator):
    """Per-class shuffled split; every class keeps >= 1 sample on each side."""
    train_idx, val_idx = [], []
    for cls in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == cls)
        members = members[rng.permutation(members.size)]
        n_val = min(members.size - 1, max(1, round(fraction * members.size)))
        val_idx.extend(members[:n_val].tolist())
        train_idx.extend(members[n_val:].tolist())
    return sorted(train_idx), sorted(val_idx)


def _evaluate(params: ModelParams, x: np.ndarray, labels: np.ndarray) -> tuple[float, float]:
    cache = forward(params, x, training=False)
    n = x.shape[0]
    shifted = cache.logits - cache.logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = float(-log_probs[np.arange(n), labels].mean())
    accuracy = float((cache.probs.argmax(axis=1) == labels).mean())
    return loss, accuracy


def train(dataset, train_cfg: TrainConfig,
          model_cfg: ModelConfig | None = None) -> tuple[ModelParams, TrainHistory]:
    """Train from scratch on ``dataset`` = list of (features, label).

    Deterministic given ``train_cfg.seed``: initialization, the stratified
    validation split, epoch shuffling, and dropout masks all come from one
    seeded generator.  Requires at least 2 samples per class so the split
    can hold out one of each.
    """
    model_cfg = model_cfg or ModelConfig()
    x = np.stack([np.asarray(getattr(f, "values", f), dtype=np.float64) for f, _ in dataset])
    labels = np.array([int(label) for _, label in dataset])

    counts = collections.Counter(labels.tolist())
    thin = [cls for cls, n in counts.items() if n < 2]
    if thin:
        raise InvalidInputError(f"need >= 2 samples per class; classes {sorted(thin)} are short")

    rng = np.random.default_rng(train_cfg.seed)
    params = init_params(model_cfg, rng)
    state = AdamState.zeros_like(params)
    train_idx, val_idx = _stratified_split(labels, train_cfg.validation_fraction, rng)
    x_train, y_train = x[train_idx], labels[train_idx]
    x_val, y_val = x[val_idx], labels[val_idx]

    history = TrainHistory(val_indices=list(val_idx))
    step = 0
    for _ in range(train_cfg.epochs):
        order = rng.permutation(len(train_idx))
        epoch_loss = 0.0
        epoch_hits = 0
        for start in range(0, order.size, train_cfg.batch_size):
            take = order[start : start + train_cfg.batch_size]
            batch = [(x_train[i], int(y_train[i])) for i in take]
            loss, grads, cache = loss_and_gradients_cached(params, batch, rng=rng, training=True)
            step += 1
            params, state = adam_step(
                params, grads, state, step,
                learning_rate=train_cfg.learning_rate,
                beta1=train_cfg.adam_beta1,
                beta2=train_cfg.adam_beta2,
                epsilon=train_cfg.adam_epsilon,
            )
            epoch_loss += loss * take.size
            # Training accuracy reuses the training-mode forward; an extra
            # eval-mode pass per batch would double the epoch cost.
            epoch_hits += int((cache.probs.argmax(axis=1) == y_train[take]).sum())
        history.train_loss.append(epoch_loss / order.size)
        history.train_accuracy.append(epoch_hits / order.size)
        val_loss, val_acc = _evaluate(params, x_val, y_val)
        history.val_loss.append(val_loss)
        history.val_accuracy.append(val_acc)
    return params, history
