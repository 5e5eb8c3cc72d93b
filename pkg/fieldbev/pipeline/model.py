"""One forward pass of the full model over one scene.

raw grid → F_v → Gaussian / NeRF attributes → renders (training and
evaluation only) and opacity volumes → HOA attention → BEV mask.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..diffcore import DiffTensor, as_tensor
from ..hoa import (
    FusedOpacity, MaskLoss,
    apply_attention, bev_from_voxels, bev_mask_head, mask_loss, multiscale_hsa, select_opacity,
)
from ..rendering import (
    RenderLoss, RenderOutput,
    fuse, ray_layout, render_loss, splat_layout, splat_render, volume_render,
)
from ..rf_decoder import (
    GaussianAttributes, NerfAttributes,
    decode_gaussians, decode_nerf, opacity_volume, project_features,
)
from ..scene_synth import SyntheticScene
from .config import RunConfig
from .state import ModelParams


@dataclass(kw_only=True, eq=False)
class ViewRenders:
    view: int
    gs: RenderOutput | None = None
    nerf: RenderOutput | None = None
    fused: RenderOutput | None = None

    def predictions(self) -> list[RenderOutput]:
        return [r for r in (self.gs, self.nerf, self.fused) if r is not None]

    @property
    def final(self) -> RenderOutput:
        """The model's image for this view: fused when both fields render."""
        return self.fused or self.gs or self.nerf


@dataclass(kw_only=True, eq=False)
class ForwardPass:
    features: DiffTensor
    gaussians: GaussianAttributes | None
    nerf: NerfAttributes | None
    renders: list[ViewRenders] = field(default_factory=list)
    render: RenderLoss | None = None
    opacity: FusedOpacity | None = None
    attention: DiffTensor | None = None  # (k, X, Y)
    mask_prob: DiffTensor | None = None  # (X, Y)
    mask: MaskLoss | None = None
    total: DiffTensor | None = None


def _cached(scene: SyntheticScene, key: tuple, build):
    if key not in scene.cache:
        scene.cache[key] = build()
    return scene.cache[key]


def render_views(
        cfg: RunConfig,
        params: ModelParams,
        scene: SyntheticScene,
        views: Sequence[int],
        gaussians: GaussianAttributes | None,
        nerf: NerfAttributes | None,
) -> list[ViewRenders]:
    out = []
    for view in views:
        cam = scene.cameras[view]
        result = ViewRenders(view=view)
        if gaussians is not None:
            layout = None
            if cfg.footprint == "point":
                layout = _cached(scene, ("splat", view), lambda: splat_layout(gaussians.positions, cam))
            result.gs = splat_render(
                gaussians, cam, background=scene.background_image, footprint=cfg.footprint, layout=layout,
            )
        if nerf is not None:
            rays = _cached(scene, ("rays", view), lambda: ray_layout(cam, scene.grid))
            result.nerf = volume_render(
                nerf, cam, scene.source_views, spec=scene.grid, background=scene.background_image, layout=rays,
            )
        if result.gs is not None and result.nerf is not None:
            result.fused = fuse(result.gs, result.nerf, params.fusion)
        out.append(result)
    return out


def bev_branch(cfg: RunConfig, params: ModelParams, fp: ForwardPass, gt_mask: np.ndarray | None) -> None:
    """HOA attention (when enabled) and the BEV mask head, written into `fp`."""
    bev = bev_from_voxels(fp.features, params.bev)
    if cfg.hoa:
        o_gs = opacity_volume(fp.gaussians) if fp.gaussians is not None else None
        o_nerf = opacity_volume(fp.nerf) if fp.nerf is not None else None
        source = cfg.opacity_source
        # a single-field run can only attend with the field it has
        if o_gs is None:
            source = "nerf"
        elif o_nerf is None:
            source = "gs"
        fp.opacity = select_opacity(
            o_gs, o_nerf, params.fusion, params.hoa, source=source, strategy=cfg.fusion_strategy,
        )
        fp.attention = multiscale_hsa(
            fp.opacity.volume, cfg.k, params.hoa, multiscale=cfg.multiscale, slices=cfg.hsa,
        )
        bev = apply_attention(bev, fp.attention)
    fp.mask_prob = bev_mask_head(bev, params.bev)
    if cfg.bev_mask and gt_mask is not None:
        fp.mask = mask_loss(fp.mask_prob, gt_mask, cfg.loss.bce, cfg.loss.dice)


def forward(
        cfg: RunConfig,
        params: ModelParams,
        scene: SyntheticScene,
        views: Sequence[int],
        mode: str,
        *,
        render: bool = True,
) -> ForwardPass:
    """Total loss = L_render (over `views`, loss mask per `mode`) + L_mask."""
    features = project_features(scene.raw_grid, params.decoder)
    fp = ForwardPass(
        features=features,
        gaussians=decode_gaussians(features, params.decoder, scene.grid) if cfg.uses_gs else None,
        nerf=decode_nerf(features, params.decoder) if cfg.uses_nerf else None,
    )
    total = as_tensor(0.0)
    if render and views:
        fp.renders = render_views(cfg, params, scene, views, fp.gaussians, fp.nerf)
        fp.render = render_loss(
            scene, views, [r.predictions() for r in fp.renders], cfg.loss, mode, depth=cfg.depth_render,
        )
        total = total + fp.render.total
    bev_branch(cfg, params, fp, scene.mask_bev)
    if fp.mask is not None:
        total = total + fp.mask.total
    fp.total = total
    return fp
