"""Softmax cross-entropy objective and its per-class derivatives."""

from __future__ import annotations

import numpy as np

PROB_FLOOR = 1e-15


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax, shift-stabilized."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=1, keepdims=True)


def log_loss(probs: np.ndarray, class_idx: np.ndarray) -> float:
    """Mean negative log-probability of the true class."""
    picked = probs[np.arange(len(class_idx)), class_idx]
    return float(-np.log(np.clip(picked, PROB_FLOOR, None)).mean())


def gradient_hessian(probs: np.ndarray, class_idx: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivative of per-row cross-entropy w.r.t. class-k score.

    For p = softmax(s) and true class y: dL/ds_k = p_k - [y == k] and
    d2L/ds_k^2 = p_k (1 - p_k), the exact diagonal of the softmax Hessian.
    """
    pk = probs[:, k]
    grad = pk - (class_idx == k).astype(np.float64)
    hess = pk * (1.0 - pk)
    return grad, hess
