"""Foreground rasterizers: projected-box hulls in the image, footprints in BEV."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .boxes import Box3D
from .camera import Camera, project_points
from .grid import VoxelGridSpec, bev_cell_centers

# binary uint8 grids: Mask2D is (H, W), MaskBEV is (X, Y)
Mask2D = np.ndarray
MaskBEV = np.ndarray

_HULL_TOL = 1e-9


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices (monotone chain), collinear points dropped."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def points_in_hull(hull: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Half-plane test against every CCW hull edge, boundary inclusive."""
    inside = np.ones(points.shape[:-1], dtype=bool)
    for a, b in zip(hull, np.roll(hull, -1, axis=0)):
        edge = b - a
        rel = points - a
        inside &= edge[0] * rel[..., 1] - edge[1] * rel[..., 0] >= -_HULL_TOL
    return inside


def box_to_mask2d(box: Box3D, cam: Camera) -> Mask2D:
    """Pixels whose centres lie in the hull of the box's visible projected corners."""
    mask = np.zeros((cam.height, cam.width), dtype=np.uint8)
    uv, _, in_front = project_points(box.corners(), cam)
    uv = uv[in_front]
    if len(uv) == 0:
        return mask
    hull = convex_hull(uv)
    if len(hull) < 3:
        # degenerate (edge-on) hull: mark the pixels containing its vertices
        cols = np.floor(hull[:, 0]).astype(int)
        rows = np.floor(hull[:, 1]).astype(int)
        ok = (cols >= 0) & (cols < cam.width) & (rows >= 0) & (rows < cam.height)
        mask[rows[ok], cols[ok]] = 1
        return mask
    lo = np.clip(np.floor(hull.min(axis=0)).astype(int), 0, [cam.width, cam.height])
    hi = np.clip(np.ceil(hull.max(axis=0)).astype(int) + 1, 0, [cam.width, cam.height])
    if lo[0] >= hi[0] or lo[1] >= hi[1]:
        return mask
    cu, cv = np.meshgrid(np.arange(lo[0], hi[0]) + 0.5, np.arange(lo[1], hi[1]) + 0.5)
    inside = points_in_hull(hull, np.stack([cu, cv], axis=-1))
    mask[lo[1]:hi[1], lo[0]:hi[0]] = inside.astype(np.uint8)
    return mask


def union_mask2d(boxes: Iterable[Box3D], cam: Camera) -> Mask2D:
    mask = np.zeros((cam.height, cam.width), dtype=np.uint8)
    for box in boxes:
        mask |= box_to_mask2d(box, cam)
    return mask


def boxes_to_maskbev(boxes: Iterable[Box3D], spec: VoxelGridSpec) -> MaskBEV:
    """Cells whose centres lie inside any box's yaw-rotated footprint."""
    centers = bev_cell_centers(spec)
    mask = np.zeros(spec.dims[:2], dtype=np.uint8)
    for box in boxes:
        mask |= box.footprint_contains(centers).astype(np.uint8)
    return mask
