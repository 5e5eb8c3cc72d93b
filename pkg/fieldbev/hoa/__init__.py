from .params import HOAParams, BevParams, PYRAMID_LEVELS
from .fusion import (
    FusedOpacity, FUSION_STRATEGIES, OPACITY_SOURCES,
    query_source, cross_attention, concat_conv, opacity_fusion, select_opacity,
)
from .hsa import hsa, column_pool, multiscale_hsa
from .bev import bev_from_voxels, apply_attention, bev_mask_head
from .mask import MaskLoss, binary_cross_entropy, dice_loss, mask_loss, bev_iou, IOU_THRESHOLD

__all__ = [
    "HOAParams", "BevParams", "PYRAMID_LEVELS",
    "FusedOpacity", "FUSION_STRATEGIES", "OPACITY_SOURCES",
    "query_source", "cross_attention", "concat_conv", "opacity_fusion", "select_opacity",
    "hsa", "column_pool", "multiscale_hsa",
    "bev_from_voxels", "apply_attention", "bev_mask_head",
    "MaskLoss", "binary_cross_entropy", "dice_loss", "mask_loss", "bev_iou", "IOU_THRESHOLD",
]
