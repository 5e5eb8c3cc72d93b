"""Height slice attention over a three-level opacity pyramid."""
from __future__ import annotations

from ..adapters import reject
from ..diffcore import DiffTensor, ops
from ..failures import ErrDivisibility, ErrShape
from .params import HOAParams


def _divisible(op: str, dividend_name: str, dividend: int, divisor_name: str, divisor: int) -> None:
    if divisor < 1 or dividend % divisor:
        raise reject(ErrDivisibility(
            op=op,
            dividend_name=dividend_name,
            dividend=dividend,
            divisor_name=divisor_name,
            divisor=divisor,
            message=f"{op}: {dividend_name}={dividend} is not divisible by {divisor_name}={divisor}",
        ))


def _matching_groups(k: int, params: HOAParams) -> None:
    if k != params.groups:
        raise reject(ErrShape(
            op="hsa",
            shapes=((k,), (params.groups,)),
            message=f"hsa: k={k} does not match the {params.groups} height groups of the parameters",
        ))


def hsa(volume: DiffTensor, k: int, params: HOAParams, level: int = 0) -> DiffTensor:
    """
    Pre-activation attention maps (k, X, Y) of a channel-first (Z, X, Y) volume.

    Group g max-pools height slices g·Z/k … (g+1)·Z/k − 1, then applies its
    own scalar 1×1 convolution for this pyramid level. Groups come out in
    ascending height order.
    """
    z, x, y = volume.shape
    _divisible("hsa", "Z", z, "k", k)
    _matching_groups(k, params)
    pooled = ops.max_pool(volume.reshape(k, z // k, x, y), axis=1)
    weight = ops.broadcast_to(params.group_weight[level].reshape(k, 1, 1), (k, x, y))
    bias = ops.broadcast_to(params.group_bias[level].reshape(k, 1, 1), (k, x, y))
    return pooled * weight + bias


def column_pool(volume: DiffTensor, k: int) -> DiffTensor:
    """HSA removed: one max over the whole height column, shared by all k maps."""
    _, x, y = volume.shape
    return ops.broadcast_to(ops.max_pool(volume, axis=0).reshape(1, x, y), (k, x, y))


def multiscale_hsa(
        o_f: DiffTensor,
        k: int,
        params: HOAParams,
        *,
        multiscale: bool = True,
        slices: bool = True,
) -> DiffTensor:
    """
    Attention maps (k, X, Y) in (0, 1) from an (X, Y, Z) opacity volume.

    Levels: P0 = o_f, P1 and P2 by stride-2 3×3 convolutions. The
    per-level HSA maps are summed coarse to fine through stride-2
    transposed convolutions, then squashed once by a sigmoid. With
    `multiscale` off only the full-resolution level is used. With `slices`
    off every level uses `column_pool` instead of HSA.
    """
    x, y, _ = o_f.shape
    _matching_groups(k, params)

    def level_maps(p: DiffTensor, level: int) -> DiffTensor:
        return hsa(p, k, params, level=level) if slices else column_pool(p, k)

    p0 = o_f.transpose(2, 0, 1)
    m0 = level_maps(p0, 0)
    if not multiscale:
        return ops.sigmoid(m0)
    _divisible("multiscale_hsa", "X", x, "4", 4)
    _divisible("multiscale_hsa", "Y", y, "4", 4)
    p1 = params.down_fine(p0)
    p2 = params.down_coarse(p1)
    m1 = level_maps(p1, 1)
    m2 = level_maps(p2, 2)
    cascade = params.up_coarse(m2) + m1
    return ops.sigmoid(params.up_fine(cascade) + m0)
