"""Analytic ray caster: the reference renderer every learned renderer is checked against."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..geometry import Box3D, Camera, camera_rays


def ray_box_distance(origin: np.ndarray, dirs: np.ndarray, box: Box3D) -> np.ndarray:
    """Slab-method hit distance along unit `dirs`; +inf where the ray misses.

    A camera inside the box reports the exit distance.
    """
    o = box.to_local(origin)
    d = np.asarray(dirs) @ box.rotation
    half = box.half
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (-half - o) / d
        t2 = (half - o) / d
    lo = np.fmin(t1, t2)
    hi = np.fmax(t1, t2)
    # rays parallel to a slab: inside → unbounded, outside → never
    parallel = d == 0
    inside_slab = np.abs(o) <= half
    lo = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), lo)
    hi = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), hi)
    t_near = lo.max(axis=-1)
    t_far = hi.min(axis=-1)
    hit = (t_near <= t_far) & (t_far > 0)
    t = np.where(t_near > 0, t_near, t_far)
    return np.where(hit, t, np.inf)


def cast(
        boxes: Sequence[Box3D],
        cam: Camera,
        background: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """(rgb (H, W, 3), depth (H, W)): nearest hit's colour and distance, else background and 0."""
    origin, dirs = camera_rays(cam)
    best = np.full(dirs.shape[:-1], np.inf)
    rgb = np.array(background, dtype=np.float64, copy=True)
    for box in boxes:
        t = ray_box_distance(origin, dirs, box)
        closer = t < best
        best = np.where(closer, t, best)
        rgb[closer] = box.color
    depth = np.where(np.isfinite(best), best, 0.0)
    return rgb, depth


def raycast_reference(scene, cam: Camera) -> tuple[np.ndarray, np.ndarray]:
    """Reference RGB and depth for any camera over `scene`'s boxes."""
    return cast(scene.boxes, cam, scene.background_image)
