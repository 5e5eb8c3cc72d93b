from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from loguru import logger

from ..adapters import reject
from ..failures import ErrSampling
from ..geometry import (
    Box3D, Camera, VoxelGridSpec, look_at_camera, union_mask2d, boxes_to_maskbev, voxel_centers,
)
from ..runtime import ordered_map
from .config import SceneConfig
from .raycast import cast

MAX_ATTEMPTS = 1000
CHECKER_CELL = 8


@dataclass(kw_only=True, frozen=True, eq=False)
class SourceViews:
    """GT images the NeRF colour head samples from, with their cameras."""

    images: np.ndarray  # (V, H, W, 3)
    cameras: tuple[Camera, ...]


@dataclass(kw_only=True, eq=False)
class SyntheticScene:
    config: SceneConfig
    boxes: tuple[Box3D, ...]
    background_image: np.ndarray  # (H, W, 3)
    cameras: tuple[Camera, ...]
    gt_rgb: np.ndarray  # (V, H, W, 3)
    gt_depth: np.ndarray  # (V, H, W), 0 where no box is hit
    masks2d: np.ndarray  # (V, H, W) uint8
    mask_bev: np.ndarray  # (X, Y) uint8
    raw_grid: np.ndarray  # (C_raw, X, Y, Z)
    # per-view render layouts, filled lazily by the renderers
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def grid(self) -> VoxelGridSpec:
        return self.config.grid

    @property
    def n_views(self) -> int:
        return len(self.cameras)

    @property
    def source_views(self) -> SourceViews:
        return SourceViews(images=self.gt_rgb, cameras=self.cameras)


def background_image(cfg: SceneConfig) -> np.ndarray:
    h, w = cfg.image_height, cfg.image_width
    base = np.asarray(cfg.background_color, dtype=np.float64)
    image = np.broadcast_to(base, (h, w, 3)).copy()
    if cfg.background == "checker":
        rows, cols = np.indices((h, w))
        odd = ((rows // CHECKER_CELL + cols // CHECKER_CELL) % 2).astype(bool)
        image[odd] = 0.5 * base + 0.25
    return image


def ring_cameras(cfg: SceneConfig) -> tuple[Camera, ...]:
    """V cameras evenly spaced on a horizontal ring, all aimed at the grid centre."""
    cx, cy = cfg.grid.center[:2]
    target = (cx, cy, cfg.grid.origin[2] + cfg.target_height)
    cams = []
    for v in range(cfg.camera_count):
        angle = 2.0 * np.pi * v / cfg.camera_count
        eye = (
            cx + cfg.ring_radius * np.cos(angle),
            cy + cfg.ring_radius * np.sin(angle),
            cfg.grid.origin[2] + cfg.camera_height,
        )
        cams.append(look_at_camera(eye, target, width=cfg.image_width, height=cfg.image_height, fov_deg=cfg.fov_deg))
    return tuple(cams)


def sample_boxes(cfg: SceneConfig) -> tuple[Box3D, ...]:
    """Non-overlapping boxes by rejection sampling on footprint circles."""
    rng = np.random.default_rng(cfg.seed)
    count = int(rng.integers(cfg.box_count[0], cfg.box_count[1] + 1))
    cx, cy = cfg.grid.center[:2]
    floor = cfg.grid.origin[2]
    boxes: list[Box3D] = []
    for _ in range(count):
        for attempt in range(1, MAX_ATTEMPTS + 1):
            length = rng.uniform(*cfg.box_length)
            width = rng.uniform(*cfg.box_width)
            height = rng.uniform(*cfg.box_height)
            yaw = rng.uniform(-np.pi, np.pi)
            x = cx + rng.uniform(-cfg.position_range, cfg.position_range)
            y = cy + rng.uniform(-cfg.position_range, cfg.position_range)
            color = rng.uniform(0.2, 1.0, size=3)
            box = Box3D(center=(x, y, floor + height / 2.0), size=(length, width, height), yaw=yaw, color=tuple(color))
            if all(np.hypot(x - b.center[0], y - b.center[1]) > box.footprint_radius + b.footprint_radius for b in boxes):
                boxes.append(box)
                break
        else:
            raise reject(ErrSampling(
                seed=cfg.seed,
                attempts=MAX_ATTEMPTS,
                placed=len(boxes),
                message=f"could not place box {len(boxes) + 1}/{count} after {MAX_ATTEMPTS} attempts (seed {cfg.seed})",
            ))
    return tuple(boxes)


def raw_voxel_grid(cfg: SceneConfig, boxes: Sequence[Box3D]) -> np.ndarray:
    """Channel 0 occupancy, 1–3 box colour (0 outside), the rest seeded uniform noise."""
    spec = cfg.grid
    centers = voxel_centers(spec)
    grid = np.zeros((cfg.raw_channels, spec.n_voxels))
    for box in boxes:
        inside = box.contains(centers)
        grid[0, inside] = 1.0
        grid[1:4, inside] = np.asarray(box.color)[:, None]
    if cfg.noise_channels:
        # separate stream: changing the noise level never moves the boxes
        noise_rng = np.random.default_rng([cfg.seed, 1])
        grid[4:] = cfg.noise_level * noise_rng.uniform(size=(cfg.noise_channels, spec.n_voxels))
    return grid.reshape((cfg.raw_channels, *spec.dims))


def build_scene(cfg: SceneConfig, boxes: Sequence[Box3D]) -> SyntheticScene:
    """Render ground truth for explicit boxes (used by `generate_scene` and by tests)."""
    boxes = tuple(boxes)
    cameras = ring_cameras(cfg)
    background = background_image(cfg)
    rendered = ordered_map(lambda cam: cast(boxes, cam, background), cameras)
    masks = ordered_map(lambda cam: union_mask2d(boxes, cam), cameras)
    return SyntheticScene(
        config=cfg,
        boxes=boxes,
        background_image=background,
        cameras=cameras,
        gt_rgb=np.stack([rgb for rgb, _ in rendered]),
        gt_depth=np.stack([depth for _, depth in rendered]),
        masks2d=np.stack(masks),
        mask_bev=boxes_to_maskbev(boxes, cfg.grid),
        raw_grid=raw_voxel_grid(cfg, boxes),
    )


def generate_scene(cfg: SceneConfig) -> SyntheticScene:
    boxes = sample_boxes(cfg)
    logger.debug("SYNTH | seed {} | {} boxes", cfg.seed, len(boxes))
    return build_scene(cfg, boxes)
