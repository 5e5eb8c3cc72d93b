from __future__ import annotations

from typing import Callable

import numpy as np

from .tensor import DiffTensor, backward, no_grad


def central_differences(fn: Callable[[DiffTensor], DiffTensor], values: np.ndarray, step: float) -> np.ndarray:
    """Numerical gradient of a scalar-valued `fn`, one element at a time."""
    x = np.array(values, dtype=np.float64)
    flat = x.reshape(-1)
    numeric = np.zeros_like(flat)
    with no_grad():
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            up = fn(DiffTensor(x)).item()
            flat[i] = keep - step
            down = fn(DiffTensor(x)).item()
            flat[i] = keep
            numeric[i] = (up - down) / (2.0 * step)
    return numeric.reshape(x.shape)


def gradcheck(fn: Callable[[DiffTensor], DiffTensor], point: DiffTensor | np.ndarray, step: float = 1e-6) -> float:
    """Relative error between the analytic and central-difference gradients.

    max|analytic - central| / max(max|analytic|, max|central|, 1e-12): the
    worst element error against the gradient's own scale, so entries that
    are zero up to rounding cannot dominate.
    """
    values = point.values if isinstance(point, DiffTensor) else np.asarray(point, dtype=np.float64)
    leaf = DiffTensor(values, requires_grad=True)
    backward(fn(leaf))
    analytic = leaf.grad.copy()
    numeric = central_differences(fn, values, step)
    if analytic.size == 0:
        return 0.0
    scale = max(float(np.abs(analytic).max()), float(np.abs(numeric).max()), 1e-12)
    return float(np.abs(analytic - numeric).max() / scale)
