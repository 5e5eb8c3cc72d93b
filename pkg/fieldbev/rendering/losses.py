"""Masked rendering losses.

Every loss takes a list of predictions (any of I_gs, I_nerf, I_f or the
matching depths), sums the per-prediction terms and leaves the batch
mean over rendered views to `render_loss`. Only masked pixels matter:
both sides are multiplied by the mask before comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from ..adapters import reject
from ..diffcore import DiffTensor, as_tensor, ops
from ..failures import ErrConfig, ErrShape
from .output import RenderOutput
from .ssim import ssim

RENDER_MODES = ("scene", "object")


@dataclass(kw_only=True, frozen=True)
class LossWeights:
    mse: float = 10.0
    ssim: float = 1.0
    l1: float = 1.0
    bce: float = 10.0
    dice: float = 10.0

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not value >= 0:
                raise reject(ErrConfig(
                    key=f"loss.{f.name}",
                    value=str(value),
                    message=f"loss weight {f.name} must be ≥ 0, got {value}",
                ))


@dataclass(kw_only=True, eq=False)
class RenderLoss:
    total: DiffTensor
    mse: DiffTensor
    ssim: DiffTensor
    l1: DiffTensor


def _mask_like(mask: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape == shape:
        return mask
    if mask.shape == shape[:-1]:
        return np.broadcast_to(mask[..., None], shape)
    raise reject(ErrShape(op="mask", shapes=(mask.shape, shape), message=f"mask {mask.shape} does not fit {shape}"))


def _check(op: str, pred: DiffTensor, gt: np.ndarray) -> None:
    if pred.shape != gt.shape:
        raise reject(ErrShape(op=op, shapes=(pred.shape, gt.shape), message=f"{op}: prediction {pred.shape} vs target {gt.shape}"))


def masked_mse(preds: Sequence[DiffTensor], gt: np.ndarray, mask: np.ndarray) -> DiffTensor:
    """Σ_preds mean(((I − Î) ⊙ M)²) over every pixel and channel."""
    gt = np.asarray(gt, dtype=np.float64)
    m = _mask_like(mask, gt.shape)
    total = as_tensor(0.0)
    for pred in preds:
        _check("masked_mse", pred, gt)
        total = total + ops.mean(ops.square((pred - gt) * m))
    return total


def masked_ssim(preds: Sequence[DiffTensor], gt: np.ndarray, mask: np.ndarray) -> DiffTensor:
    """Σ_preds 1 − SSIM(I ⊙ M, Î ⊙ M)."""
    gt = np.asarray(gt, dtype=np.float64)
    m = _mask_like(mask, gt.shape)
    target = gt * m
    total = as_tensor(0.0)
    for pred in preds:
        _check("masked_ssim", pred, gt)
        total = total + (1.0 - ssim(pred * m, target))
    return total


def masked_l1_depth(preds: Sequence[DiffTensor], gt_depth: np.ndarray, mask: np.ndarray, *, normalizer: float = 1.0) -> DiffTensor:
    """Σ_preds mean(|(D − D̂) ⊙ M|) / normalizer."""
    gt = np.asarray(gt_depth, dtype=np.float64)
    m = _mask_like(mask, gt.shape)
    total = as_tensor(0.0)
    for pred in preds:
        _check("masked_l1_depth", pred, gt)
        total = total + ops.mean(ops.abs((pred - gt) * m))
    return ops.scale(total, 1.0 / normalizer)


def combine(weights: LossWeights, mse, ssim_term, l1) -> DiffTensor:
    return weights.mse * as_tensor(mse) + weights.ssim * as_tensor(ssim_term) + weights.l1 * as_tensor(l1)


def loss_mask(scene, view: int, mode: str) -> np.ndarray:
    """All-ones in `scene` mode, the view's union box mask in `object` mode."""
    if mode not in RENDER_MODES:
        raise reject(ErrConfig(key="mode", value=mode, allowed=RENDER_MODES, message=f"unknown render-loss mode {mode!r}"))
    if mode == "scene":
        return np.ones(scene.masks2d.shape[1:])
    return scene.masks2d[view].astype(np.float64)


def render_loss(
        scene,
        views: Sequence[int],
        outputs: Sequence[Sequence[RenderOutput]],
        weights: LossWeights,
        mode: str,
        *,
        depth: bool = True,
) -> RenderLoss:
    """
    Weighted rendering loss over the rendered views.

    `outputs[i]` holds the predictions rendered for `views[i]` (for the
    hybrid model: gs, nerf, fused). Each component is averaged over the
    views; depths are divided by the grid diagonal. With `depth` off the
    L1 term is a constant 0.
    """
    n = len(views)
    mse = ssim_term = l1 = as_tensor(0.0)
    for view, preds in zip(views, outputs):
        mask = loss_mask(scene, view, mode)
        mse = mse + masked_mse([p.image for p in preds], scene.gt_rgb[view], mask)
        ssim_term = ssim_term + masked_ssim([p.image for p in preds], scene.gt_rgb[view], mask)
        if depth:
            l1 = l1 + masked_l1_depth(
                [p.depth for p in preds], scene.gt_depth[view], mask, normalizer=scene.grid.diagonal,
            )
    if n:
        mse, ssim_term, l1 = (ops.scale(t, 1.0 / n) for t in (mse, ssim_term, l1))
    return RenderLoss(total=combine(weights, mse, ssim_term, l1), mse=mse, ssim=ssim_term, l1=l1)
