"""Policy extraction and loss functions with their gradients."""

from __future__ import annotations

from typing import Tuple

import numpy as np

from rdq_lab.errors import UsageError


def _check_temperature(temperature: float) -> None:
    if temperature <= 0:
        raise UsageError(f"temperature must be > 0 (got {temperature})")


def log_softmax(v: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Row-wise ``log softmax(v / temperature)`` with max subtraction."""
    _check_temperature(temperature)
    z = np.asarray(v, dtype=np.float64) / temperature
    z = z - np.max(z, axis=-1, keepdims=True)
    return z - np.log(np.sum(np.exp(z), axis=-1, keepdims=True))


def softmax(v: np.ndarray, temperature: float = 1.0) -> np.ndarray:
    """Probability vector (or rows) ``exp(v_i/τ) / Σ exp(v_j/τ)``."""
    return np.exp(log_softmax(v, temperature))


def smooth_l1(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """``0.5 d²`` for ``|d| < 1``, else ``|d| - 0.5``; elementwise, d = pred - target."""
    d = np.asarray(pred, dtype=np.float64) - target
    abs_d = np.abs(d)
    return np.where(abs_d < 1.0, 0.5 * d**2, abs_d - 0.5)


def smooth_l1_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Derivative of :func:`smooth_l1` with respect to *pred*."""
    d = np.asarray(pred, dtype=np.float64) - target
    return np.where(np.abs(d) < 1.0, d, np.sign(d))


def squared_error(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    d = np.asarray(pred, dtype=np.float64) - target
    return d**2


def squared_error_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    return 2.0 * (np.asarray(pred, dtype=np.float64) - target)


Q_LOSSES = {
    "smooth_l1": (smooth_l1, smooth_l1_grad),
    "squared": (squared_error, squared_error_grad),
}


def floor_teacher(teacher: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    """Clamp teacher entries to at least *floor*, then renormalize each row."""
    t = np.maximum(np.asarray(teacher, dtype=np.float64), floor)
    return t / np.sum(t, axis=-1, keepdims=True)


def kl_divergence(student: np.ndarray, teacher: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    """``Σ s_i ln(s_i / t_i)`` against the floored teacher; ``0 ln 0 = 0``."""
    s = np.asarray(student, dtype=np.float64)
    t = floor_teacher(teacher, floor)
    safe_s = np.where(s > 0.0, s, 1.0)
    terms = np.where(s > 0.0, s * (np.log(safe_s) - np.log(t)), 0.0)
    return np.sum(terms, axis=-1)


def kl_from_logits(
    logits: np.ndarray,
    teacher: np.ndarray,
    temperature: float = 1.0,
    floor: float = 1e-6,
) -> Tuple[np.ndarray, np.ndarray]:
    """KL(softmax(logits/τ) ‖ floored teacher) per row and its gradient w.r.t. *logits*.

    With ``s = softmax(z/τ)`` the gradient is
    ``(1/τ) · s_j · ((ln s_j − ln t_j) − KL)``.
    """
    log_s = log_softmax(logits, temperature)
    s = np.exp(log_s)
    log_t = np.log(floor_teacher(teacher, floor))
    diff = log_s - log_t
    kl = np.sum(s * diff, axis=-1)
    grad = s * (diff - kl[..., None]) / temperature
    return kl, grad
