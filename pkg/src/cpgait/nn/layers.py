"""Vectorized 1D convolution and dense layers with explicit backward passes.

Batched layouts: conv tensors are (batch, maps, length), dense tensors
(batch, width).  Convolutions are 'valid' cross-correlations (no padding);
the output length for kernel k and stride s is floor((L - k) / s) + 1.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError


def conv_output_length(length: int, kernel: int = 3, stride: int = 2) -> int:
    if length < kernel:
        raise InvalidInputError(f"input length {length} shorter than kernel {kernel}")
    return (length - kernel) // stride + 1


def _im2col(x: np.ndarray, kernel: int, stride: int) -> np.ndarray:
    """Gather sliding windows: (B, C, L) -> (B, C, kernel, T)."""
    batch, chans, length = x.shape
    t_out = conv_output_length(length, kernel, stride)
    cols = np.empty((batch, chans, kernel, t_out), dtype=np.float64)
    for j in range(kernel):
        cols[:, :, j, :] = x[:, :, j : j + stride * (t_out - 1) + 1 : stride]
    return cols


def conv1d_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray, stride: int = 2):
    """Valid cross-correlation.

    x: (B, C, L); weights: (M, C, k); biases: (M,).  Returns
    ``(out, cols)`` where out is (B, M, T) and cols is the im2col buffer
    kept for the backward pass.
    """
    batch = x.shape[0]
    m_out, c_in, kernel = weights.shape
    if x.shape[1] != c_in:
        raise InvalidInputError(f"channel mismatch: input {x.shape[1]}, weights {c_in}")
    cols = _im2col(x, kernel, stride)
    t_out = cols.shape[-1]
    # (M, C*k) @ (B, C*k, T) -> (B, M, T)
    out = np.matmul(weights.reshape(m_out, c_in * kernel), cols.reshape(batch, c_in * kernel, t_out))
    out += biases[:, None]
    return out, cols


def conv1d_backward(d_out: np.ndarray, cols: np.ndarray, weights: np.ndarray,
                    input_length: int, stride: int = 2):
    """Gradients of a valid cross-correlation.

    d_out: (B, M, T).  Returns ``(d_x, d_weights, d_biases)`` with d_x of
    shape (B, C, input_length).
    """
    batch, m_out, t_out = d_out.shape
    _, c_in, kernel = weights.shape
    cols_flat = cols.reshape(batch, c_in * kernel, t_out)
    d_w = np.matmul(d_out, cols_flat.transpose(0, 2, 1)).sum(axis=0).reshape(m_out, c_in, kernel)
    d_b = d_out.sum(axis=(0, 2))
    # (C*k, M) @ (B, M, T) -> (B, C*k, T), then scatter-add windows back.
    d_cols = np.matmul(weights.reshape(m_out, c_in * kernel).T, d_out)
    d_cols = d_cols.reshape(batch, c_in, kernel, t_out)
    d_x = np.zeros((batch, c_in, input_length), dtype=np.float64)
    for j in range(kernel):
        d_x[:, :, j : j + stride * (t_out - 1) + 1 : stride] += d_cols[:, :, j, :]
    return d_x, d_w, d_b


def dense_forward(x: np.ndarray, weights: np.ndarray, biases: np.ndarray) -> np.ndarray:
    """x: (B, F); weights: (out, F); biases: (out,) -> (B, out)."""
    return x @ weights.T + biases


def dense_backward(d_out: np.ndarray, x: np.ndarray, weights: np.ndarray):
    """Returns ``(d_x, d_weights, d_biases)`` for a dense layer."""
    d_w = d_out.T @ x
    d_b = d_out.sum(axis=0)
    d_x = d_out @ weights
    return d_x, d_w, d_b
