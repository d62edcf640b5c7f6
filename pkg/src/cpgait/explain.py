"""Grad-CAM relevance maps for the 1D gait classifier.

The coarse map lives on the last conv layer's time axis (87 points under
the default config), is rectified, linearly upsampled to the 1414-point
input, and normalized to [0, 1] by its maximum.  The upsampled map is
then resliced into the 14 model-channel rows; interpolation deliberately
runs across channel boundaries of the flattened vector, matching how the
model itself consumes one flat input.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channels import (
    CHANNEL_CATALOG,
    CYCLE_POINTS,
    MODEL_CHANNEL_INDEX,
    MODEL_CHANNELS,
    ChannelId,
    GaitClass,
    Side,
)
from .errors import InvalidInputError
from .nn.network import ModelParams, forward, grad_logit_wrt_last_conv
from .series import FeatureVector


class RelevanceLevel(enum.IntEnum):
    """Ordinal relevance bins: low < 1/3 <= middle < 2/3 <= high."""

    LOW = 0
    MIDDLE = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.lower()


def bin_relevance(r: float) -> RelevanceLevel:
    """Discretize a relevance score in [0, 1] into the three ordinal bins."""
    if not 0.0 <= r <= 1.0:
        raise InvalidInputError(f"relevance score must be in [0, 1], got {r}")
    if r < 1.0 / 3.0:
        return RelevanceLevel.LOW
    if r < 2.0 / 3.0:
        return RelevanceLevel.MIDDLE
    return RelevanceLevel.HIGH


@dataclass(frozen=True)
class RelevanceMap:
    """Per-leg Grad-CAM scores in [0, 1] over the flattened input."""

    raw: np.ndarray  # (1414,)
    target_class: GaitClass
    side: Side

    def __post_init__(self):
        raw = np.asarray(self.raw, dtype=np.float64)
        raw = raw.copy()
        raw.flags.writeable = False
        object.__setattr__(self, "raw", raw)

    @property
    def per_channel(self) -> dict[ChannelId, np.ndarray]:
        """Reshape of ``raw`` into 101-point rows, in model-channel order.

        Only defined for production-geometry maps (1414 points); maps from
        reduced test configs expose ``raw`` alone.
        """
        if self.raw.shape[0] != len(MODEL_CHANNELS) * CYCLE_POINTS:
            raise InvalidInputError(
                f"per-channel rows need a {len(MODEL_CHANNELS) * CYCLE_POINTS}-point map, "
                f"got {self.raw.shape[0]}"
            )
        rows = self.raw.reshape(len(MODEL_CHANNELS), CYCLE_POINTS)
        return {channel: rows[i] for i, channel in enumerate(MODEL_CHANNELS)}

    def channel_row(self, channel: ChannelId) -> np.ndarray:
        idx = MODEL_CHANNEL_INDEX[channel]
        return self.raw[idx * CYCLE_POINTS : (idx + 1) * CYCLE_POINTS]

    def levels(self) -> np.ndarray:
        """Ordinal bin (0/1/2) per raw position."""
        levels = np.ones(self.raw.shape, dtype=np.int64)
        levels[self.raw < 1.0 / 3.0] = 0
        levels[self.raw >= 2.0 / 3.0] = 2
        return levels


def upsample_coarse_map(coarse: np.ndarray, n_out: int) -> np.ndarray:
    """Linear interpolation of the coarse map onto the input grid.

    Coarse index k sits at input position k * (n_out - 1) / (n_coarse - 1).
    """
    n_coarse = coarse.shape[0]
    positions = np.arange(n_coarse) * (n_out - 1) / (n_coarse - 1)
    return np.interp(np.arange(n_out), positions, coarse)


def grad_cam(params: ModelParams, x: FeatureVector | np.ndarray,
             target_class: GaitClass, side: Side | None = None) -> RelevanceMap:
    """Grad-CAM relevance of ``target_class`` for one leg, inference mode.

    Steps: cache last-conv activations A, take the gradient of the
    pre-softmax target logit w.r.t. A, pool that gradient over time into
    per-map weights, combine, rectify, upsample, and divide by the map
    maximum (an identically zero map stays zero).
    """
    params.check_finite()
    if side is None:
        side = x.source[1] if isinstance(x, FeatureVector) else Side.LEFT
    cache = forward(params, x, training=False)
    activations = cache.last_conv_act[0]  # (maps, T)
    grads = grad_logit_wrt_last_conv(params, cache, target_class)[0]
    weights = grads.mean(axis=1)  # temporal mean per map
    coarse = np.maximum(weights @ activations, 0.0)
    raw = upsample_coarse_map(coarse, params.config.input_length)
    peak = raw.max()
    if peak > 0.0:
        raw = raw / peak
    return RelevanceMap(raw=raw, target_class=target_class, side=side)


def overview_relevance(left: RelevanceMap, right: RelevanceMap) -> dict[ChannelId, np.ndarray]:
    """Pointwise max of the two legs' relevance rows, for all 29 catalog
    channels; channels outside the model set get all-zero rows."""
    left_rows = left.per_channel
    right_rows = right.per_channel
    overview = {}
    for channel in CHANNEL_CATALOG:
        if channel in MODEL_CHANNEL_INDEX:
            overview[channel] = np.maximum(left_rows[channel], right_rows[channel])
        else:
            overview[channel] = np.zeros(CYCLE_POINTS)
    return overview


def relevance_at(relevance: RelevanceMap, channel: ChannelId,
                 cycle_percent: float) -> tuple[float, bool]:
    """Interpolated relevance at a cycle position.

    Returns ``(score, in_model)``; channels outside the model set yield
    ``(0.0, False)``.
    """
    if channel not in MODEL_CHANNEL_INDEX:
        return 0.0, False
    if not 0.0 <= cycle_percent <= 100.0:
        raise InvalidInputError(f"cycle percent must be in [0, 100], got {cycle_percent}")
    row = relevance.channel_row(channel)
    return float(np.interp(cycle_percent, np.arange(CYCLE_POINTS), row)), True
