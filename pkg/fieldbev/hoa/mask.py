from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adapters import reject
from ..diffcore import DiffTensor, as_tensor, ops
from ..failures import ErrShape

PROB_FLOOR = 1e-7
DICE_SMOOTH = 1.0
IOU_THRESHOLD = 0.5


@dataclass(kw_only=True, eq=False)
class MaskLoss:
    total: DiffTensor
    bce: DiffTensor
    dice: DiffTensor


def binary_cross_entropy(pred: DiffTensor, gt: np.ndarray) -> DiffTensor:
    p = ops.clamp(pred, PROB_FLOOR, 1.0 - PROB_FLOOR)
    return -ops.mean(ops.mul(gt, ops.log(p)) + ops.mul(1.0 - gt, ops.log(1.0 - p)))


def dice_loss(pred: DiffTensor, gt: np.ndarray) -> DiffTensor:
    """1 − (2·Σ p·g + ε) / (Σ p + Σ g + ε), ε = 1."""
    intersection = ops.sum(pred * gt)
    return 1.0 - (2.0 * intersection + DICE_SMOOTH) / (ops.sum(pred) + (float(gt.sum()) + DICE_SMOOTH))


def mask_loss(pred, gt: np.ndarray, bce_weight: float = 10.0, dice_weight: float = 10.0) -> MaskLoss:
    pred = as_tensor(pred)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise reject(ErrShape(op="mask_loss", shapes=(pred.shape, gt.shape), message=f"mask_loss: {pred.shape} vs {gt.shape}"))
    bce = binary_cross_entropy(pred, gt)
    dice = dice_loss(pred, gt)
    return MaskLoss(total=bce_weight * bce + dice_weight * dice, bce=bce, dice=dice)


def bev_iou(pred: np.ndarray, gt: np.ndarray, threshold: float = IOU_THRESHOLD) -> float:
    """IoU of `pred ≥ threshold` against the binary target; 1 when both are empty."""
    p = np.asarray(pred) >= threshold
    g = np.asarray(gt) > 0
    union = np.logical_or(p, g).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(p, g).sum() / union)
