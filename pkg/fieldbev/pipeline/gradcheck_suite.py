"""Central-difference checks of every differentiable operation on small random inputs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from loguru import logger

from ..diffcore import DiffTensor, gradcheck, ops
from ..geometry import VoxelGridSpec, look_at_camera, unproject
from ..hoa import (
    BevParams, HOAParams,
    apply_attention, bev_from_voxels, bev_mask_head, mask_loss, multiscale_hsa, opacity_fusion,
)
from ..rendering import (
    FusionParams, RenderOutput,
    fuse, masked_l1_depth, masked_mse, masked_ssim, splat_render, volume_render,
)
from ..rf_decoder import (
    DecoderParams, GaussianAttributes, NerfAttributes, decode_gaussians, decode_nerf, project_features,
)
from ..scene_synth import SourceViews

TOLERANCE = 1e-5
STEP = 1e-6
# independent random draws of every case
DRAWS = 3


@dataclass(frozen=True)
class GradCase:
    name: str
    fn: Callable[[DiffTensor], DiffTensor]
    point: np.ndarray


def _weighted(rng: np.random.Generator) -> Callable[[DiffTensor], DiffTensor]:
    """Reduce any tensor to a scalar with fixed random weights (drawn on first use per shape)."""
    weights: dict[tuple[int, ...], np.ndarray] = {}

    def reduce(t: DiffTensor) -> DiffTensor:
        if t.shape not in weights:
            weights[t.shape] = rng.uniform(0.5, 1.5, size=t.shape)
        return ops.sum(t * weights[t.shape])

    return reduce


def _op_cases(rng: np.random.Generator) -> list[GradCase]:
    w = _weighted(rng)
    x34 = rng.normal(size=(3, 4))
    pos34 = rng.uniform(0.5, 2.0, size=(3, 4))
    m = rng.normal(size=(4, 5))
    image = rng.normal(size=(2, 6, 6))
    kernel = rng.normal(size=(3, 2, 3, 3)) * 0.3
    up_kernel = rng.normal(size=(2, 3, 3, 3)) * 0.3
    bias3 = rng.normal(size=3)
    bias5 = rng.normal(size=5)
    distinct = rng.permutation(24).reshape(2, 3, 4) / 10.0 + rng.uniform(0, 0.01, size=(2, 3, 4))
    index = np.array([[0, 2, -1], [1, 1, 0]])
    return [
        GradCase("ops.add_mul_div", lambda x: w(x * pos34 + x / pos34 - 2.0 * x), x34),
        GradCase("ops.exp_log", lambda x: w(ops.exp(x) + ops.log(x)), pos34),
        GradCase("ops.sigmoid_softplus", lambda x: w(ops.sigmoid(x) + ops.softplus(x)), x34),
        GradCase("ops.square_abs", lambda x: w(ops.square(x) + ops.abs(x)), pos34),
        GradCase("ops.softmax", lambda x: w(ops.softmax(x, axis=1)), x34),
        GradCase("ops.l2_normalize", lambda x: w(ops.l2_normalize(x, axis=1)), x34),
        GradCase("ops.cumprod_exclusive", lambda x: w(ops.cumprod_exclusive(x)), rng.uniform(0.2, 0.9, size=(3, 5))),
        GradCase("ops.matmul", lambda x: w(ops.matmul(x, m)), x34),
        GradCase("ops.affine", lambda x: w(ops.affine(x, m, bias5)), x34),
        GradCase("ops.reshape_transpose", lambda x: w(x.reshape(4, 3).transpose() * pos34), x34),
        GradCase("ops.broadcast_to", lambda x: w(ops.broadcast_to(x.reshape(3, 1, 4), (3, 2, 4))), x34),
        GradCase("ops.concat", lambda x: w(ops.concat([x, ops.square(x)], axis=1)), x34),
        GradCase("ops.gather", lambda x: w(ops.gather(x, index, fill=0.25)), x34),
        GradCase("ops.max_pool", lambda x: w(ops.max_pool(x, axis=1)), distinct),
        GradCase("ops.conv2d", lambda x: w(ops.conv2d(x, kernel, bias3)), image),
        GradCase("ops.conv2d_stride2", lambda x: w(ops.conv2d(x, kernel, bias3, stride=2, padding=1)), image),
        GradCase("ops.conv_transpose2d", lambda x: w(ops.conv_transpose2d(x, up_kernel, bias3)), image),
    ]


def _decoder_cases(rng: np.random.Generator) -> list[GradCase]:
    w = _weighted(rng)
    spec = VoxelGridSpec(origin=(-0.5, -0.5, 0.0), voxel_size=0.5, dims=(2, 2, 2))
    params = DecoderParams.init(rng, raw_channels=4, feature_channels=4, hidden=6, n_views=3)
    features = rng.normal(size=(4, 2, 2, 2))
    raw = rng.normal(size=(4, 2, 2, 2))
    return [
        GradCase("decoder.projection", lambda x: w(project_features(x, params)), raw),
        GradCase("decoder.scale", lambda x: w(decode_gaussians(x, params, spec).scales), features),
        GradCase("decoder.rotation", lambda x: w(decode_gaussians(x, params, spec).rotations), features),
        GradCase("decoder.opacity", lambda x: w(decode_gaussians(x, params, spec).opacity), features),
        GradCase("decoder.color", lambda x: w(decode_gaussians(x, params, spec).colors), features),
        GradCase("decoder.density", lambda x: w(decode_nerf(x, params).opacity), features),
        GradCase("decoder.view_weight", lambda x: w(decode_nerf(x, params).view_weight), features),
    ]


def _render_output_loss(w, out: RenderOutput) -> DiffTensor:
    return w(out.image) + w(out.depth)


def _splat_cases(rng: np.random.Generator) -> list[GradCase]:
    w = _weighted(rng)
    cam = look_at_camera((0.0, -6.0, 1.0), (0.0, 0.0, 1.0), width=4, height=4, fov_deg=60.0)
    # three Gaussians stacked on one pixel ray, two elsewhere
    positions = np.stack([
        unproject(1.3, 2.6, 2.0, cam),
        unproject(1.3, 2.6, 3.0, cam),
        unproject(1.3, 2.6, 4.5, cam),
        unproject(2.7, 0.4, 3.5, cam),
        unproject(3.2, 3.1, 5.0, cam),
    ])
    colors = DiffTensor(rng.uniform(0.1, 0.9, size=(5, 3)))
    scales = DiffTensor(rng.uniform(1.2, 2.0, size=(5, 3)))
    rotations = DiffTensor(np.tile([1.0, 0.0, 0.0, 0.0], (5, 1)))
    opacity = DiffTensor(rng.uniform(0.2, 0.8, size=(5, 1)))
    background = rng.uniform(0.0, 1.0, size=(4, 4, 3))

    def gaussians(**overrides) -> GaussianAttributes:
        fields = dict(positions=positions, scales=scales, rotations=rotations, opacity=opacity, colors=colors, dims=(5, 1, 1))
        fields.update(overrides)
        return GaussianAttributes(**fields)

    return [
        GradCase(
            "splat.opacity",
            lambda x: _render_output_loss(w, splat_render(gaussians(opacity=ops.sigmoid(x)), cam, background=background)),
            rng.normal(size=(5, 1)),
        ),
        GradCase(
            "splat.color",
            lambda x: _render_output_loss(w, splat_render(gaussians(colors=ops.sigmoid(x)), cam, background=background)),
            rng.normal(size=(5, 3)),
        ),
        GradCase(
            "splat.disk_scale",
            lambda x: _render_output_loss(w, splat_render(gaussians(scales=x), cam, background=background, footprint="disk")),
            rng.uniform(1.2, 2.0, size=(5, 3)),
        ),
    ]


def _volume_cases(rng: np.random.Generator) -> list[GradCase]:
    w = _weighted(rng)
    spec = VoxelGridSpec(origin=(-0.5, -0.5, 0.5), voxel_size=0.5, dims=(2, 2, 2))
    cam = look_at_camera((0.0, -3.0, 1.0), (0.0, 0.0, 1.0), width=4, height=4, fov_deg=60.0)
    sources = SourceViews(
        images=rng.uniform(0.0, 1.0, size=(3, 8, 8, 3)),
        cameras=tuple(
            look_at_camera((4.0 * np.cos(a), 4.0 * np.sin(a), 1.5), (0.0, 0.0, 1.0), width=8, height=8, fov_deg=60.0)
            for a in (0.3, 1.9, 3.7)
        ),
    )
    logits = DiffTensor(rng.normal(size=(8, 3)))
    density_raw = rng.normal(size=(8, 1))

    def nerf(density: DiffTensor, view_weight: DiffTensor) -> NerfAttributes:
        return NerfAttributes(density=density, view_weight=view_weight, opacity=1.0 - ops.exp(-density), dims=(2, 2, 2))

    return [
        GradCase(
            "volume.density",
            lambda x: _render_output_loss(w, volume_render(nerf(ops.softplus(x), logits), cam, sources, spec=spec)),
            density_raw,
        ),
        GradCase(
            "volume.view_weight",
            lambda x: _render_output_loss(
                w, volume_render(nerf(DiffTensor(np.logaddexp(0.0, density_raw)), x), cam, sources, spec=spec),
            ),
            logits.values.copy(),
        ),
    ]


def _loss_cases(rng: np.random.Generator) -> list[GradCase]:
    w = _weighted(rng)
    a = RenderOutput(image=DiffTensor(rng.uniform(size=(4, 4, 3))), depth=DiffTensor(rng.uniform(1, 5, size=(4, 4))))
    b = RenderOutput(image=DiffTensor(rng.uniform(size=(4, 4, 3))), depth=DiffTensor(rng.uniform(1, 5, size=(4, 4))))
    gt = rng.uniform(size=(12, 12, 3))
    gt_depth = rng.uniform(1, 5, size=(12, 12))
    mask = (rng.uniform(size=(12, 12)) < 0.6).astype(np.float64)
    other = DiffTensor(rng.uniform(size=(12, 12, 3)))
    return [
        GradCase(
            "rendering.fuse",
            lambda x: _render_output_loss(w, fuse(a, b, FusionParams(theta=x))),
            np.array(0.3),
        ),
        GradCase("loss.masked_mse", lambda x: masked_mse([x, other], gt, mask), rng.uniform(size=(12, 12, 3))),
        GradCase("loss.masked_ssim", lambda x: masked_ssim([x, other], gt, mask), rng.uniform(size=(12, 12, 3))),
        GradCase(
            "loss.masked_l1_depth",
            lambda x: masked_l1_depth([x], gt_depth, mask, normalizer=3.0),
            gt_depth + rng.choice([-1.0, 1.0], size=(12, 12)) * rng.uniform(0.1, 0.5, size=(12, 12)),
        ),
    ]


def _hoa_cases(rng: np.random.Generator) -> list[GradCase]:
    w = _weighted(rng)
    hoa = HOAParams.init(rng, height=4, groups=2)
    hoa.group_weight.values[...] = rng.uniform(0.5, 1.5, size=hoa.group_weight.shape)
    bev = BevParams.init(rng, voxel_channels=4, bev_channels=4)
    o_nerf = rng.uniform(0.05, 0.95, size=(4, 4, 4))
    gt_mask = (rng.uniform(size=(4, 4)) < 0.4).astype(np.float64)
    query_gs = FusionParams.init(theta=1.0)
    query_nerf = FusionParams.init(theta=-1.0)
    mean_fusion = FusionParams.init(theta=0.4)
    o_gs = rng.uniform(0.05, 0.95, size=(4, 4, 4))
    bev_map = rng.normal(size=(4, 4, 4))
    maps = rng.uniform(0.05, 0.95, size=(2, 4, 4))
    return [
        GradCase("hoa.opacity_fusion.gs_query", lambda x: w(opacity_fusion(x, o_nerf, query_gs, hoa).volume), rng.uniform(0.05, 0.95, size=(4, 4, 4))),
        GradCase("hoa.opacity_fusion.nerf_query", lambda x: w(opacity_fusion(x, o_nerf, query_nerf, hoa).volume), rng.uniform(0.05, 0.95, size=(4, 4, 4))),
        GradCase(
            "hoa.opacity_fusion.weighted_mean",
            lambda x: w(opacity_fusion(x, o_nerf, mean_fusion, hoa, strategy="weighted_mean").volume),
            rng.uniform(0.05, 0.95, size=(4, 4, 4)),
        ),
        GradCase(
            "hoa.opacity_fusion.weighted_mean.theta",
            lambda x: w(opacity_fusion(o_gs, o_nerf, FusionParams(theta=x), hoa, strategy="weighted_mean").volume),
            np.array(rng.normal()),
        ),
        GradCase(
            "hoa.opacity_fusion.concat_conv",
            lambda x: w(opacity_fusion(x, o_nerf, mean_fusion, hoa, strategy="concat_conv").volume),
            rng.uniform(0.05, 0.95, size=(4, 4, 4)),
        ),
        GradCase("hoa.multiscale_hsa", lambda x: w(multiscale_hsa(x, 2, hoa)), rng.uniform(0.05, 0.95, size=(4, 4, 4))),
        GradCase(
            "hoa.multiscale_hsa.unsliced",
            lambda x: w(multiscale_hsa(x, 2, hoa, slices=False)),
            rng.uniform(0.05, 0.95, size=(4, 4, 4)),
        ),
        GradCase("hoa.bev_from_voxels", lambda x: w(bev_from_voxels(x, bev)), rng.normal(size=(4, 4, 4, 4))),
        GradCase("hoa.apply_attention.features", lambda x: w(apply_attention(x, maps)), rng.normal(size=(4, 4, 4))),
        GradCase("hoa.apply_attention.maps", lambda x: w(apply_attention(bev_map, x)), rng.uniform(0.05, 0.95, size=(2, 4, 4))),
        GradCase("hoa.mask_head", lambda x: w(bev_mask_head(x, bev)), rng.normal(size=(4, 4, 4))),
        GradCase("hoa.mask_loss", lambda x: mask_loss(ops.sigmoid(x), gt_mask).total, rng.normal(size=(4, 4))),
    ]


def suite_cases(seed: int = 0) -> list[GradCase]:
    rng = np.random.default_rng(seed)
    return [
        *_op_cases(rng), *_decoder_cases(rng), *_splat_cases(rng),
        *_volume_cases(rng), *_loss_cases(rng), *_hoa_cases(rng),
    ]


def run_gradcheck_suite(seed: int = 0, draws: int = DRAWS) -> list[tuple[str, float]]:
    """(case name, worst relative error) for every case, in suite order.

    Each case is drawn `draws` times, from seeds seed … seed + draws − 1.
    """
    worst: dict[str, float] = {}
    for draw in range(draws):
        for case in suite_cases(seed + draw):
            error = gradcheck(case.fn, case.point, step=STEP)
            logger.debug("GRADCHECK | {} | draw {} | {:.3e}", case.name, draw, error)
            worst[case.name] = max(worst.get(case.name, 0.0), error)
    return list(worst.items())
