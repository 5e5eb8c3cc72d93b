from __future__ import annotations

from ..adapters import reject
from ..diffcore import DiffTensor, ops
from ..failures import ErrDivisibility
from .params import BevParams


def bev_from_voxels(features: DiffTensor, params: BevParams) -> DiffTensor:
    """(C_v, X, Y, Z) → (C, X, Y): height sum, then the 1×1 reducer."""
    return params.reducer(ops.sum(features, axis=3))


def apply_attention(bev: DiffTensor, maps: DiffTensor) -> DiffTensor:
    """Scale channel block i (C/k contiguous channels) by attention map i."""
    c, x, y = bev.shape
    k = maps.shape[0]
    if k < 1 or c % k:
        raise reject(ErrDivisibility(
            op="apply_attention",
            dividend_name="C",
            dividend=c,
            divisor_name="k",
            divisor=k,
            message=f"apply_attention: C={c} is not divisible by k={k}",
        ))
    blocks = bev.reshape(k, c // k, x, y)
    spread = ops.broadcast_to(maps.reshape(k, 1, x, y), (k, c // k, x, y))
    return (blocks * spread).reshape(c, x, y)


def bev_mask_head(bev: DiffTensor, params: BevParams) -> DiffTensor:
    """Foreground probability (X, Y)."""
    _, x, y = bev.shape
    return ops.sigmoid(params.mask_head(bev)).reshape(x, y)
