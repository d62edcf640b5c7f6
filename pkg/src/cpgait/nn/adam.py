"""Adam optimizer over ModelParams-shaped tensor collections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import ModelParams


@dataclass
class AdamState:
    """First/second moment estimates, one tensor per parameter tensor."""

    m: ModelParams
    v: ModelParams

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        return cls(m=params.map(np.zeros_like), v=params.map(np.zeros_like))


def adam_step(params: ModelParams, grads: ModelParams, state: AdamState, t: int,
              learning_rate: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
              epsilon: float = 1e-8) -> tuple[ModelParams, AdamState]:
    """One bias-corrected Adam update, elementwise, in place.

    ``t`` is the 1-based step index.  Returns the (mutated) params and
    state for call-chaining.
    """
    for (_, p), (_, g), (_, m), (_, v) in zip(
        params.tensors(), grads.tensors(), state.m.tensors(), state.v.tensors()
    ):
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * np.square(g)
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        p -= learning_rate * m_hat / (np.sqrt(v_hat) + epsilon)
    return params, state
