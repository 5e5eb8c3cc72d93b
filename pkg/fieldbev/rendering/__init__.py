from .output import RenderOutput, FOOTPRINTS
from .splat import SplatLayout, splat_layout, splat_render, disk_radius
from .volume import RayLayout, ray_layout, sample_source_views, volume_render, BACKGROUND_THRESHOLD, FALLBACK_GRAY
from .fusion import FusionParams, blend, fuse
from .ssim import ssim, ssim_map, blur, gaussian_window, band_matrix
from .losses import (
    LossWeights, RenderLoss, RENDER_MODES,
    masked_mse, masked_ssim, masked_l1_depth, combine, loss_mask, render_loss,
)

__all__ = [
    "RenderOutput", "FOOTPRINTS",
    "SplatLayout", "splat_layout", "splat_render", "disk_radius",
    "RayLayout", "ray_layout", "sample_source_views", "volume_render",
    "BACKGROUND_THRESHOLD", "FALLBACK_GRAY",
    "FusionParams", "blend", "fuse",
    "ssim", "ssim_map", "blur", "gaussian_window", "band_matrix",
    "LossWeights", "RenderLoss", "RENDER_MODES",
    "masked_mse", "masked_ssim", "masked_l1_depth", "combine", "loss_mask", "render_loss",
]
