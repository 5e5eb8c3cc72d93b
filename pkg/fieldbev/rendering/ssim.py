"""Structural similarity with an 11×11 Gaussian window (σ = 1.5, zero padding).

The separable blur is two matrix products with constant band matrices,
so SSIM differentiates through ordinary tape ops.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..adapters import reject
from ..diffcore import DiffTensor, as_tensor, ops
from ..failures import ErrShape

WINDOW = 11
SIGMA = 1.5
C1 = 0.01 ** 2
C2 = 0.03 ** 2


def gaussian_window(size: int = WINDOW, sigma: float = SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


@lru_cache(maxsize=16)
def band_matrix(n: int, size: int = WINDOW, sigma: float = SIGMA) -> np.ndarray:
    """(n, n) matrix B with (B @ x)[i] = Σ_j g[j − i + r]·x[j], zero beyond the edges."""
    g = gaussian_window(size, sigma)
    r = size // 2
    i, j = np.indices((n, n))
    offset = j - i + r
    band = np.where((offset >= 0) & (offset < size), g[np.clip(offset, 0, size - 1)], 0.0)
    band.setflags(write=False)
    return band


def blur(x: DiffTensor) -> DiffTensor:
    """Gaussian blur of an (H, W, C) tensor over H and W."""
    h, w, c = x.shape
    rows = ops.matmul(band_matrix(h), x.reshape(h, w * c)).reshape(h, w, c)
    cols = ops.matmul(band_matrix(w), rows.transpose(1, 0, 2).reshape(w, h * c))
    return cols.reshape(w, h, c).transpose(1, 0, 2)


def _channels(x) -> DiffTensor:
    x = as_tensor(x)
    return x.reshape(*x.shape, 1) if x.ndim == 2 else x


def ssim_map(a, b) -> DiffTensor:
    a, b = _channels(a), _channels(b)
    if a.shape != b.shape:
        raise reject(ErrShape(op="ssim", shapes=(a.shape, b.shape), message=f"ssim: {a.shape} vs {b.shape}"))
    if min(a.shape[:2]) < WINDOW:
        raise reject(ErrShape(
            op="ssim",
            shapes=(a.shape,),
            message=f"ssim: images must be at least {WINDOW}×{WINDOW}, got {a.shape[:2]}",
        ))
    mu_a, mu_b = blur(a), blur(b)
    var_a = blur(a * a) - mu_a * mu_a
    var_b = blur(b * b) - mu_b * mu_b
    cov = blur(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2)
    den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2)
    return num / den


def ssim(a, b) -> DiffTensor:
    """Mean SSIM over pixels and channels (dynamic range 1)."""
    return ssim_map(a, b).mean()
