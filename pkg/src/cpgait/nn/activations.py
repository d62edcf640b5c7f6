"""Activation functions and alpha dropout for the self-normalizing CNN."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError

SELU_ALPHA = 1.6732632423543772848170429916717
SELU_LAMBDA = 1.0507009873554804934193349852946

#: Value dropped units are set to: the negative saturation of SELU.
ALPHA_DROP_VALUE = -SELU_LAMBDA * SELU_ALPHA


def selu(x):
    """SELU: lambda*x for x > 0, lambda*alpha*(exp(x) - 1) otherwise."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, SELU_LAMBDA * x, SELU_LAMBDA * SELU_ALPHA * np.expm1(np.minimum(x, 0)))


def selu_grad(x):
    """Derivative of SELU at the pre-activation ``x``."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x > 0, SELU_LAMBDA, SELU_LAMBDA * SELU_ALPHA * np.exp(np.minimum(x, 0)))


def softmax(logits, axis=-1):
    """Numerically stable softmax along ``axis``."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=axis, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=axis, keepdims=True)


def log_softmax(logits, axis=-1):
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def alpha_dropout_affine(rate: float) -> tuple[float, float]:
    """The (a, b) correction restoring zero mean / unit variance after dropping.

    With drop probability p, keep probability q, and dropped value
    alpha' = -lambda*alpha:  a = (q + alpha'^2 * p * q)^(-1/2),  b = -a*p*alpha'.
    """
    p = rate
    q = 1.0 - p
    a = (q + ALPHA_DROP_VALUE**2 * p * q) ** -0.5
    b = -a * p * ALPHA_DROP_VALUE
    return a, b


def alpha_dropout(x, rate: float, training: bool, rng: np.random.Generator | None = None):
    """Alpha dropout: returns ``(out, keep_mask)``.

    Inference mode (or rate 0) is the identity with an all-ones mask.  In
    training mode dropped units are set to ``ALPHA_DROP_VALUE`` and the
    affine correction from :func:`alpha_dropout_affine` is applied, which
    preserves the zero-mean/unit-variance fixed point of SELU activations.
    """
    if not 0.0 <= rate < 1.0:
        raise InvalidInputError(f"dropout rate must be in [0, 1), got {rate}")
    x = np.asarray(x, dtype=np.float64)
    if not training or rate == 0.0:
        return x, np.ones_like(x, dtype=bool)
    if rng is None:
        raise InvalidInputError("training-mode alpha dropout needs an rng")
    keep = rng.random(x.shape) >= rate
    a, b = alpha_dropout_affine(rate)
    out = a * np.where(keep, x, ALPHA_DROP_VALUE) + b
    return out, keep


def alpha_dropout_backward(d_out, keep_mask, rate: float):
    """Gradient of alpha dropout w.r.t. its input, given the sampled mask."""
    if rate == 0.0:
        return d_out
    a, _ = alpha_dropout_affine(rate)
    return d_out * (a * keep_mask)
