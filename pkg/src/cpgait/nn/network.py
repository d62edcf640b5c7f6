"""The 1D CNN classifier: configuration, parameters, forward pass, gradients.

Architecture: four stride-2 valid convolutions (kernel 3, 64 maps, SELU)
over the flat 1x1414 input, flatten, alpha dropout, a 512-wide SELU dense
layer, alpha dropout, and a 4-way softmax output.  Under the default
config the conv output lengths are 706, 352, 175, 87, so the flatten
width is 87 * 64 = 5568.

Everything is float64; forward caches keep all intermediates so the
backward pass and Grad-CAM can reuse them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channels import FEATURE_LENGTH, GaitClass
from ..errors import InvalidInputError, InvalidModelError
from ..series import FeatureVector
from .activations import (
    alpha_dropout,
    alpha_dropout_backward,
    selu,
    selu_grad,
    softmax,
)
from .layers import (
    conv1d_backward,
    conv1d_forward,
    conv_output_length,
    dense_backward,
    dense_forward,
)


@dataclass(frozen=True)
class ModelConfig:
    """Hyperparameters of the classifier; defaults are the production model."""

    conv_layers: int = 4
    feature_maps: int = 64
    filter_size: int = 3
    stride: int = 2
    fc_width: int = 512
    num_classes: int = 4
    dropout_rate: float = 0.05
    input_length: int = FEATURE_LENGTH

    def conv_lengths(self) -> list[int]:
        """Signal length after each conv layer."""
        lengths = []
        length = self.input_length
        for _ in range(self.conv_layers):
            length = conv_output_length(length, self.filter_size, self.stride)
            lengths.append(length)
        return lengths

    @property
    def flatten_size(self) -> int:
        return self.conv_lengths()[-1] * self.feature_maps


@dataclass
class ModelParams:
    """All trainable tensors, plus the config that fixes their shapes."""

    config: ModelConfig
    conv_w: list[np.ndarray]
    conv_b: list[np.ndarray]
    fc1_w: np.ndarray
    fc1_b: np.ndarray
    out_w: np.ndarray
    out_b: np.ndarray

    def tensors(self):
        """Yield (name, array) for every parameter tensor, in a fixed order."""
        for i, (w, b) in enumerate(zip(self.conv_w, self.conv_b), start=1):
            yield f"conv{i}.w", w
            yield f"conv{i}.b", b
        yield "fc1.w", self.fc1_w
        yield "fc1.b", self.fc1_b
        yield "out.w", self.out_w
        yield "out.b", self.out_b

    def map(self, fn) -> "ModelParams":
        """A new ModelParams with ``fn`` applied to every tensor."""
        return ModelParams(
            config=self.config,
            conv_w=[fn(w) for w in self.conv_w],
            conv_b=[fn(b) for b in self.conv_b],
            fc1_w=fn(self.fc1_w),
            fc1_b=fn(self.fc1_b),
            out_w=fn(self.out_w),
            out_b=fn(self.out_b),
        )

    def copy(self) -> "ModelParams":
        return self.map(np.copy)

    def check_finite(self):
        for name, arr in self.tensors():
            if not np.all(np.isfinite(arr)):
                raise InvalidModelError(f"non-finite values in parameter tensor {name}")


def init_params(config: ModelConfig, rng: np.random.Generator) -> ModelParams:
    """LeCun-normal initialization (std = 1/sqrt(fan_in)), zero biases.

    The canonical pairing with SELU: it keeps activations near the
    zero-mean/unit-variance fixed point at depth.
    """
    conv_w, conv_b = [], []
    in_maps = 1
    for _ in range(config.conv_layers):
        fan_in = in_maps * config.filter_size
        conv_w.append(rng.normal(0.0, fan_in**-0.5, (config.feature_maps, in_maps, config.filter_size)))
        conv_b.append(np.zeros(config.feature_maps))
        in_maps = config.feature_maps
    flat = config.flatten_size
    return ModelParams(
        config=config,
        conv_w=conv_w,
        conv_b=conv_b,
        fc1_w=rng.normal(0.0, flat**-0.5, (config.fc_width, flat)),
        fc1_b=np.zeros(config.fc_width),
        out_w=rng.normal(0.0, config.fc_width**-0.5, (config.num_classes, config.fc_width)),
        out_b=np.zeros(config.num_classes),
    )


@dataclass
class ForwardCache:
    """All intermediates of one forward pass (batch-major)."""

    conv_inputs: list[np.ndarray]
    conv_cols: list[np.ndarray]
    conv_pre: list[np.ndarray]
    conv_act: list[np.ndarray]
    flat: np.ndarray
    drop1_out: np.ndarray
    drop1_mask: np.ndarray
    fc1_pre: np.ndarray
    fc1_act: np.ndarray
    drop2_out: np.ndarray
    drop2_mask: np.ndarray
    logits: np.ndarray
    probs: np.ndarray
    dropout_rate: float

    @property
    def last_conv_act(self) -> np.ndarray:
        """Activations of the last conv layer, (B, maps, T); Grad-CAM's A."""
        return self.conv_act[-1]


def _as_batch(x) -> np.ndarray:
    if isinstance(x, FeatureVector):
        x = x.values
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return x


def forward(params: ModelParams, x, training: bool = False,
            rng: np.random.Generator | None = None) -> ForwardCache:
    """Run the network on one input or a (B, L) batch.

    Inference mode is a pure function of ``params`` and ``x``; training
    mode additionally samples one dropout mask per batch item from ``rng``.
    """
    cfg = params.config
    x = _as_batch(x)
    if x.shape[1] != cfg.input_length:
        raise InvalidInputError(f"input length {x.shape[1]} != configured {cfg.input_length}")

    rate = cfg.dropout_rate if training else 0.0
    h = x[:, None, :]  # (B, 1, L)
    conv_inputs, conv_cols, conv_pre, conv_act = [], [], [], []
    for w, b in zip(params.conv_w, params.conv_b):
        conv_inputs.append(h)
        z, cols = conv1d_forward(h, w, b, cfg.stride)
        conv_cols.append(cols)
        conv_pre.append(z)
        h = selu(z)
        conv_act.append(h)

    flat = h.reshape(h.shape[0], -1)
    drop1, mask1 = alpha_dropout(flat, rate, training, rng)
    fc1_pre = dense_forward(drop1, params.fc1_w, params.fc1_b)
    fc1_act = selu(fc1_pre)
    drop2, mask2 = alpha_dropout(fc1_act, rate, training, rng)
    logits = dense_forward(drop2, params.out_w, params.out_b)
    probs = softmax(logits, axis=1)

    return ForwardCache(
        conv_inputs=conv_inputs,
        conv_cols=conv_cols,
        conv_pre=conv_pre,
        conv_act=conv_act,
        flat=flat,
        drop1_out=drop1,
        drop1_mask=mask1,
        fc1_pre=fc1_pre,
        fc1_act=fc1_act,
        drop2_out=drop2,
        drop2_mask=mask2,
        logits=logits,
        probs=probs,
        dropout_rate=rate,
    )


def _head_backward(params: ModelParams, cache: ForwardCache, d_logits: np.ndarray):
    """Backprop d_logits through the dense head down to the flattened conv
    output.  Returns ``(d_flat, d_fc1_w, d_fc1_b, d_out_w, d_out_b)``."""
    rate = cache.dropout_rate
    d_drop2, d_out_w, d_out_b = dense_backward(d_logits, cache.drop2_out, params.out_w)
    d_fc1_act = alpha_dropout_backward(d_drop2, cache.drop2_mask, rate)
    d_fc1_pre = d_fc1_act * selu_grad(cache.fc1_pre)
    d_drop1, d_fc1_w, d_fc1_b = dense_backward(d_fc1_pre, cache.drop1_out, params.fc1_w)
    d_flat = alpha_dropout_backward(d_drop1, cache.drop1_mask, rate)
    return d_flat, d_fc1_w, d_fc1_b, d_out_w, d_out_b


def _conv_stack_backward(params: ModelParams, cache: ForwardCache, d_act: np.ndarray):
    """Backprop a gradient at the last conv activation through all conv
    layers.  Returns per-layer weight/bias gradients (first layer first)."""
    cfg = params.config
    d_conv_w = [None] * cfg.conv_layers
    d_conv_b = [None] * cfg.conv_layers
    d_h = d_act
    for i in reversed(range(cfg.conv_layers)):
        d_pre = d_h * selu_grad(cache.conv_pre[i])
        d_h, d_conv_w[i], d_conv_b[i] = conv1d_backward(
            d_pre, cache.conv_cols[i], params.conv_w[i],
            cache.conv_inputs[i].shape[-1], cfg.stride,
        )
    return d_conv_w, d_conv_b


def loss_and_gradients(params: ModelParams, batch, rng: np.random.Generator | None = None,
                       training: bool = True):
    """Mean cross-entropy of a batch and its exact analytic gradients.

    ``batch`` is a list of ``(features, label)`` pairs; features may be
    FeatureVector or raw arrays, labels GaitClass or ints.  Dropout masks
    are sampled once per batch item (training mode).
    """
    loss, grads, _ = loss_and_gradients_cached(params, batch, rng=rng, training=training)
    return loss, grads


def loss_and_gradients_cached(params: ModelParams, batch,
                              rng: np.random.Generator | None = None,
                              training: bool = True):
    """Like :func:`loss_and_gradients` but also returns the forward cache."""
    if not batch:
        raise InvalidInputError("loss_and_gradients needs a non-empty batch")
    x = np.stack([_as_batch(f)[0] for f, _ in batch])
    labels = np.array([int(label) for _, label in batch])
    cache = forward(params, x, training=training, rng=rng)

    n = x.shape[0]
    # Cross-entropy via log-sum-exp for stability.
    shifted = cache.logits - cache.logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = -log_probs[np.arange(n), labels].mean()

    d_logits = cache.probs.copy()
    d_logits[np.arange(n), labels] -= 1.0
    d_logits /= n

    d_flat, d_fc1_w, d_fc1_b, d_out_w, d_out_b = _head_backward(params, cache, d_logits)
    d_last_act = d_flat.reshape(cache.last_conv_act.shape)
    d_conv_w, d_conv_b = _conv_stack_backward(params, cache, d_last_act)

    grads = ModelParams(
        config=params.config,
        conv_w=d_conv_w,
        conv_b=d_conv_b,
        fc1_w=d_fc1_w,
        fc1_b=d_fc1_b,
        out_w=d_out_w,
        out_b=d_out_b,
    )
    return float(loss), grads, cache


def logits_from_last_conv(params: ModelParams, last_act: np.ndarray) -> np.ndarray:
    """Inference-mode logits computed from last-conv activations (B, M, T).

    The forward half of the Grad-CAM gradient check: flatten -> fc1 ->
    SELU -> output layer, dropout as identity.
    """
    flat = last_act.reshape(last_act.shape[0], -1)
    fc1_act = selu(dense_forward(flat, params.fc1_w, params.fc1_b))
    return dense_forward(fc1_act, params.out_w, params.out_b)


def grad_logit_wrt_last_conv(params: ModelParams, cache: ForwardCache,
                             target_class: GaitClass | int) -> np.ndarray:
    """d logit[target] / d last-conv activations, shape (B, maps, T)."""
    n = cache.logits.shape[0]
    d_logits = np.zeros_like(cache.logits)
    d_logits[:, int(target_class)] = 1.0
    d_flat = _head_backward(params, cache, d_logits)[0]
    return d_flat.reshape(n, *cache.last_conv_act.shape[1:])


def predict(params: ModelParams, x) -> tuple[GaitClass, np.ndarray]:
    """Inference-mode class and probability vector; argmax ties break low."""
    probs = forward(params, x, training=False).probs[0]
    return GaitClass(int(np.argmax(probs))), probs


def predict_batch(params: ModelParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized inference: returns (class indices (B,), probabilities (B, 4))."""
    probs = forward(params, x, training=False).probs
    return probs.argmax(axis=1), probs
