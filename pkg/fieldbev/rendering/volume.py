"""Degenerate volume rendering: one sample per ray.

Each ray walks the voxel grid in steps of voxel_size/2 and keeps the
traversed voxel with the highest NeRF opacity. The colour at that voxel
centre is a softmax(w_nerf)-weighted mix of the source images sampled at
its projections.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from ..diffcore import DiffTensor, ops
from ..geometry import Camera, VoxelGridSpec, camera_rays, project_points, voxel_centers
from ..rf_decoder import NerfAttributes
from .output import RenderOutput, background_rows

BACKGROUND_THRESHOLD = 1e-3
FALLBACK_GRAY = 0.5
# added to the weight logits of views that cannot see the point
_HIDDEN_LOGIT = -1e30


@dataclass(kw_only=True, frozen=True, eq=False)
class RayLayout:
    """Voxels visited per pixel ray: (H·W, S) flat indices, -1 past the exit point."""

    samples: np.ndarray
    distance: np.ndarray  # (N,) voxel-centre distance to the camera
    height: int
    width: int


def ray_layout(cam: Camera, spec: VoxelGridSpec) -> RayLayout:
    origin, dirs = camera_rays(cam)
    dirs = dirs.reshape(-1, 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (spec.lower - origin) / dirs
        t2 = (spec.upper - origin) / dirs
    lo = np.where(dirs == 0, np.where((origin >= spec.lower) & (origin <= spec.upper), -np.inf, np.inf), np.fmin(t1, t2))
    hi = np.where(dirs == 0, np.where((origin >= spec.lower) & (origin <= spec.upper), np.inf, -np.inf), np.fmax(t1, t2))
    t_near = np.maximum(lo.max(axis=1), 0.0)
    t_far = hi.min(axis=1)
    # rays that miss the box get an empty interval
    miss = ~(t_far > t_near)
    t_near = np.where(miss, 0.0, t_near)
    t_far = np.where(miss, 0.0, t_far)
    step = spec.voxel_size / 2.0
    n_steps = int(np.ceil(spec.diagonal / step)) + 1
    t = t_near[:, None] + step * (np.arange(n_steps)[None, :] + 0.5)
    inside = t < t_far[:, None]
    points = origin + t[..., None] * dirs[:, None, :]
    samples = np.where(inside, spec.voxel_index(points), -1)
    distance = np.linalg.norm(voxel_centers(spec) - cam.center, axis=1)
    return RayLayout(samples=samples, distance=distance, height=cam.height, width=cam.width)


def sample_source_views(points: np.ndarray, images: np.ndarray, cameras) -> tuple[np.ndarray, np.ndarray]:
    """
    Bilinear colours of `points` in every source view.

    Pixel centres sit at +0.5; samples clamp at the image border. Returns
    colours (M, V, 3), with FALLBACK_GRAY where a view cannot see the
    point, and a visibility mask (M, V): in front of the camera and
    projecting inside the image.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    m, v_count = points.shape[0], len(cameras)
    colours = np.full((m, v_count, 3), FALLBACK_GRAY)
    visible = np.zeros((m, v_count), dtype=bool)
    for v, (image, cam) in enumerate(zip(images, cameras)):
        uv, _, in_front = project_points(points, cam)
        u = np.where(in_front, uv[:, 0], -1.0)
        w = np.where(in_front, uv[:, 1], -1.0)
        seen = in_front & (u >= 0) & (u <= cam.width) & (w >= 0) & (w <= cam.height)
        if not seen.any():
            continue
        x = np.clip(u[seen] - 0.5, 0.0, cam.width - 1.0)
        y = np.clip(w[seen] - 0.5, 0.0, cam.height - 1.0)
        x0 = np.minimum(np.floor(x).astype(np.int64), cam.width - 2) if cam.width > 1 else np.zeros(x.shape, np.int64)
        y0 = np.minimum(np.floor(y).astype(np.int64), cam.height - 2) if cam.height > 1 else np.zeros(y.shape, np.int64)
        x1 = np.minimum(x0 + 1, cam.width - 1)
        y1 = np.minimum(y0 + 1, cam.height - 1)
        fx = (x - x0)[:, None]
        fy = (y - y0)[:, None]
        top = image[y0, x0] * (1 - fx) + image[y0, x1] * fx
        bottom = image[y1, x0] * (1 - fx) + image[y1, x1] * fx
        colours[seen, v] = top * (1 - fy) + bottom * fy
        visible[seen, v] = True
    return colours, visible


def volume_render(
        n: NerfAttributes,
        cam: Camera,
        source_views,
        *,
        spec: VoxelGridSpec,
        background=None,
        layout: RayLayout | None = None,
) -> RenderOutput:
    """Pixel = o·c + (1 − o)·background, depth = o·distance, at the ray's max-opacity voxel.

    Pixels whose best opacity stays below BACKGROUND_THRESHOLD show the
    background at depth 0.
    """
    layout = layout if layout is not None else ray_layout(cam, spec)
    h, w = cam.height, cam.width
    opacity = n.opacity.reshape(-1)
    samples = layout.samples
    candidates = np.where(samples >= 0, opacity.values[np.maximum(samples, 0)], -np.inf)
    best_slot = np.argmax(candidates, axis=1)
    best = candidates[np.arange(samples.shape[0]), best_slot]
    hit = best >= BACKGROUND_THRESHOLD
    rows = np.flatnonzero(hit)
    chosen = samples[rows, best_slot[rows]]

    centres = spec.lower + spec.voxel_size * (np.stack(np.unravel_index(chosen, spec.dims), axis=1) + 0.5)
    colours, visible = sample_source_views(centres, source_views.images, source_views.cameras)
    unseen = int((~visible.any(axis=1)).sum())
    if unseen:
        logger.debug("RENDER | volume | {} sampled points outside every source view", unseen)

    m, v_count = visible.shape
    logits = ops.gather(n.view_weight, chosen) + np.where(visible, 0.0, _HIDDEN_LOGIT)
    mix = ops.softmax(logits, axis=1)
    colour = ops.sum(ops.broadcast_to(mix.reshape(m, v_count, 1), (m, v_count, 3)) * colours, axis=1)

    o = ops.gather(opacity, chosen)
    o3 = ops.broadcast_to(o.reshape(m, 1), (m, 3))
    bg = background_rows(background, h, w)
    shaded = o3 * colour + (1.0 - o3) * bg[rows]

    # scatter the hit rows back into the full image
    inverse = np.full(h * w, -1, dtype=np.int64)
    inverse[rows] = np.arange(rows.size)
    image = ops.gather(shaded, inverse) + bg * (~hit)[:, None]
    depth = ops.gather(o * layout.distance[chosen], inverse)
    return RenderOutput(image=image.reshape(h, w, 3), depth=depth.reshape(h, w), fallbacks=unseen)
