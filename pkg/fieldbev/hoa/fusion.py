"""Fusing the Gaussian and NeRF opacity volumes into one."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adapters import reject
from ..diffcore import DiffTensor, ops
from ..failures import ErrConfig, ErrShape
from ..rendering import FusionParams, blend
from .params import HOAParams

FUSION_STRATEGIES = ("cross_attention", "weighted_mean", "concat_conv")
OPACITY_SOURCES = ("fused", "gs", "nerf")


@dataclass(kw_only=True, eq=False)
class FusedOpacity:
    volume: DiffTensor  # (X, Y, Z) in (0, 1)
    # field the attention query came from; None for the non-attention strategies
    query_source: str | None = None
    attention: np.ndarray | None = None  # (X·Y, X·Y) row-stochastic weights


def query_source(fp: FusionParams) -> str:
    """`nerf` when α ≤ β (ties included), else `gs`."""
    return "nerf" if fp.alpha_value <= fp.beta_value else "gs"


def cross_attention(query_volume: DiffTensor, context_volume: DiffTensor, params: HOAParams) -> tuple[DiffTensor, np.ndarray]:
    """Single-head attention over X·Y height-column tokens, output projection then sigmoid."""
    x, y, z = query_volume.shape
    q_tokens = query_volume.reshape(x * y, z)
    c_tokens = context_volume.reshape(x * y, z)
    q = ops.matmul(q_tokens, params.query)
    k = ops.matmul(c_tokens, params.key)
    v = ops.matmul(c_tokens, params.value)
    scores = ops.scale(ops.matmul(q, k.transpose()), 1.0 / np.sqrt(z))
    weights = ops.softmax(scores, axis=1)
    out = ops.matmul(ops.matmul(weights, v), params.out)
    return ops.sigmoid(out).reshape(x, y, z), weights.values


def concat_conv(o_gs: DiffTensor, o_nerf: DiffTensor, params: HOAParams) -> DiffTensor:
    stacked = ops.concat([o_gs, o_nerf], axis=2).transpose(2, 0, 1)
    return ops.sigmoid(params.mix(stacked)).transpose(1, 2, 0)


def opacity_fusion(
        o_gs: DiffTensor,
        o_nerf: DiffTensor,
        fp: FusionParams,
        params: HOAParams,
        *,
        strategy: str = "cross_attention",
) -> FusedOpacity:
    """
    Fused opacity volume o_f.

    cross_attention: the field with the larger fusion weight queries the
    other (Q from o_nerf when α ≤ β, from o_gs otherwise).
    weighted_mean: α·o_gs + β·o_nerf.
    concat_conv: per-cell 1×1 convolution over both height columns.
    """
    if o_gs.shape != o_nerf.shape or o_gs.ndim != 3:
        raise reject(ErrShape(
            op="opacity_fusion",
            shapes=(o_gs.shape, o_nerf.shape),
            message=f"opacity_fusion: volumes must share one (X, Y, Z) shape, got {o_gs.shape} and {o_nerf.shape}",
        ))
    if strategy == "cross_attention":
        source = query_source(fp)
        query, context = (o_nerf, o_gs) if source == "nerf" else (o_gs, o_nerf)
        volume, weights = cross_attention(query, context, params)
        return FusedOpacity(volume=volume, query_source=source, attention=weights)
    if strategy == "weighted_mean":
        return FusedOpacity(volume=blend(o_gs, o_nerf, fp.alpha()))
    if strategy == "concat_conv":
        return FusedOpacity(volume=concat_conv(o_gs, o_nerf, params))
    raise reject(ErrConfig(
        key="hoa.fusion_strategy",
        value=strategy,
        allowed=FUSION_STRATEGIES,
        message=f"unknown opacity fusion strategy {strategy!r}",
    ))


def select_opacity(
        o_gs: DiffTensor,
        o_nerf: DiffTensor,
        fp: FusionParams,
        params: HOAParams,
        *,
        source: str = "fused",
        strategy: str = "cross_attention",
) -> FusedOpacity:
    """Opacity volume feeding HSA: fused, or a single field passed through."""
    if source == "fused":
        return opacity_fusion(o_gs, o_nerf, fp, params, strategy=strategy)
    if source == "gs":
        return FusedOpacity(volume=o_gs)
    if source == "nerf":
        return FusedOpacity(volume=o_nerf)
    raise reject(ErrConfig(
        key="hoa.opacity_source",
        value=source,
        allowed=OPACITY_SOURCES,
        message=f"unknown opacity source {source!r}",
    ))
