"""Degenerate Gaussian splatting.

Each Gaussian lands on the pixel that contains its projected centre
(`point` footprint) or on every pixel centre within a scale-driven radius
(`disk` footprint). Per pixel, contributors are sorted by distance to the
camera and alpha-composited front to back.

The per-pixel contributor lists are packed into an (H·W, K) index table
padded with -1, so compositing is a fixed sequence of tensor ops that the
tape can differentiate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adapters import reject
from ..diffcore import DiffTensor, ops
from ..failures import ErrConfig
from ..geometry import Camera, project_points
from ..rf_decoder import GaussianAttributes
from .output import FOOTPRINTS, RenderOutput, background_rows

MIN_DISK_RADIUS = 0.5
MAX_DISK_RADIUS = 6.0


@dataclass(kw_only=True, frozen=True, eq=False)
class SplatLayout:
    """Sorted contributors per pixel.

    slots: (H·W, K) Gaussian index per slot, -1 for padding.
    distance: (H·W, K) camera distance per slot, 0 for padding.
    entry: (H·W, K) contributor row per slot, -1 for padding (disk mode).
    """

    slots: np.ndarray
    distance: np.ndarray
    entry: np.ndarray
    height: int
    width: int

    @property
    def depth_capacity(self) -> int:
        return self.slots.shape[1]


def _pack(pixel: np.ndarray, gaussian: np.ndarray, distance: np.ndarray, height: int, width: int) -> SplatLayout:
    order = np.lexsort((distance, pixel))
    pixel, gaussian, distance = pixel[order], gaussian[order], distance[order]
    n_pixels = height * width
    counts = np.bincount(pixel, minlength=n_pixels)
    capacity = int(counts.max()) if pixel.size else 0
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    rank = np.arange(pixel.size) - starts[pixel]
    slots = np.full((n_pixels, capacity), -1, dtype=np.int64)
    dist = np.zeros((n_pixels, capacity))
    entry = np.full((n_pixels, capacity), -1, dtype=np.int64)
    slots[pixel, rank] = gaussian
    dist[pixel, rank] = distance
    entry[pixel, rank] = order
    return SplatLayout(slots=slots, distance=dist, entry=entry, height=height, width=width)


def _visible(positions: np.ndarray, cam: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    uv, _, in_front = project_points(positions, cam)
    inside = in_front.copy()
    inside[in_front] = (
        (uv[in_front, 0] >= 0) & (uv[in_front, 0] < cam.width)
        & (uv[in_front, 1] >= 0) & (uv[in_front, 1] < cam.height)
    )
    distance = np.linalg.norm(positions - cam.center, axis=1)
    return uv, inside, distance


def splat_layout(positions: np.ndarray, cam: Camera) -> SplatLayout:
    """Point-footprint layout. Depends only on positions and camera, so callers may cache it."""
    positions = np.asarray(positions, dtype=np.float64)
    uv, inside, distance = _visible(positions, cam)
    index = np.flatnonzero(inside)
    cols = np.floor(uv[index, 0]).astype(np.int64)
    rows = np.floor(uv[index, 1]).astype(np.int64)
    return _pack(rows * cam.width + cols, index, distance[index], cam.height, cam.width)


def disk_radius(scales: DiffTensor, depth: np.ndarray, cam: Camera) -> DiffTensor:
    """Pixel radius fx·mean(s)/z, clamped to [MIN_DISK_RADIUS, MAX_DISK_RADIUS]."""
    mean_scale = ops.mean(scales, axis=1)
    radius = ops.scale(mean_scale / np.where(depth > 0, depth, 1.0), cam.fx)
    return ops.clamp(radius, MIN_DISK_RADIUS, MAX_DISK_RADIUS)


def _disk_contributors(g: GaussianAttributes, cam: Camera) -> tuple[SplatLayout, DiffTensor]:
    uv, z, in_front = project_points(g.positions, cam)
    distance = np.linalg.norm(g.positions - cam.center, axis=1)
    radius = disk_radius(g.scales, z, cam)
    reach = int(np.ceil(MAX_DISK_RADIUS))
    offsets = np.arange(-reach, reach + 1)
    index = np.flatnonzero(in_front)
    r = radius.values[index]
    # candidate pixel centres around each projected centre
    base_c = np.floor(uv[index, 0]).astype(np.int64)
    base_r = np.floor(uv[index, 1]).astype(np.int64)
    dc, dr = np.meshgrid(offsets, offsets)
    cols = base_c[:, None] + dc.reshape(1, -1)
    rows = base_r[:, None] + dr.reshape(1, -1)
    d2 = (cols + 0.5 - uv[index, 0:1]) ** 2 + (rows + 0.5 - uv[index, 1:2]) ** 2
    hit = (d2 <= (r * r)[:, None]) & (cols >= 0) & (cols < cam.width) & (rows >= 0) & (rows < cam.height)
    owner, cand = np.nonzero(hit)
    gaussian = index[owner]
    layout = _pack(rows[owner, cand] * cam.width + cols[owner, cand], gaussian, distance[gaussian], cam.height, cam.width)
    # Gaussian falloff exp(-d²/2r²), differentiable through the radius
    r_entries = ops.gather(radius, gaussian)
    falloff = ops.exp(ops.scale(ops.div(d2[owner, cand], r_entries * r_entries), -0.5))
    return layout, falloff


def splat_render(
        g: GaussianAttributes,
        cam: Camera,
        *,
        background=None,
        footprint: str = "point",
        layout: SplatLayout | None = None,
) -> RenderOutput:
    """Composite the Gaussians seen by `cam`; image = Σ cᵢoᵢTᵢ + background·T_residual, depth = Σ dᵢoᵢTᵢ."""
    if footprint not in FOOTPRINTS:
        raise reject(ErrConfig(
            key="footprint",
            value=footprint,
            allowed=FOOTPRINTS,
            message=f"unknown splat footprint {footprint!r}",
        ))
    h, w = cam.height, cam.width
    opacity = g.opacity.reshape(-1)
    if footprint == "disk":
        layout, falloff = _disk_contributors(g, cam)
        alpha = ops.gather(opacity, layout.slots) * ops.gather(falloff, layout.entry)
    else:
        layout = layout if layout is not None else splat_layout(g.positions, cam)
        alpha = ops.gather(opacity, layout.slots)
    n_pixels, k = layout.slots.shape
    # trailing zero-opacity slot: its transmittance is the residual
    alpha = ops.concat([alpha, np.zeros((n_pixels, 1))], axis=1)
    transmittance = ops.cumprod_exclusive(1.0 - alpha)
    weight = alpha * transmittance
    slot_weight = weight[:, :k]
    residual = transmittance[:, k]

    colors = ops.gather(g.colors, layout.slots)
    spread = ops.broadcast_to(slot_weight.reshape(n_pixels, k, 1), (n_pixels, k, 3))
    bg = background_rows(background, h, w)
    image = ops.sum(colors * spread, axis=1) + ops.broadcast_to(residual.reshape(n_pixels, 1), (n_pixels, 3)) * bg
    depth = ops.sum(slot_weight * layout.distance, axis=1)
    return RenderOutput(image=image.reshape(h, w, 3), depth=depth.reshape(h, w))
