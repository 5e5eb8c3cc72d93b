from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..adapters import reject
from ..failures import ErrConfig
from ..geometry import VoxelGridSpec

BACKGROUND_MODES = ("flat", "checker")


def _invalid(key: str, value, message: str) -> Exception:
    return reject(ErrConfig(key=f"scene.{key}", value=str(value), message=message))


@dataclass(kw_only=True, frozen=True)
class SceneConfig:
    """Procedural scene parameters.

    Ranges are inclusive (lo, hi) pairs. Box centres are drawn with
    |x|, |y| ≤ position_range around the grid centre; boxes rest on the
    grid floor.
    """

    seed: int = 0
    box_count: tuple[int, int] = (2, 4)
    box_length: tuple[float, float] = (1.5, 4.0)
    box_width: tuple[float, float] = (1.2, 2.2)
    box_height: tuple[float, float] = (1.0, 2.5)
    position_range: float = 5.0
    camera_count: int = 6
    ring_radius: float = 14.0
    camera_height: float = 4.0
    target_height: float = 1.0
    fov_deg: float = 60.0
    image_height: int = 64
    image_width: int = 64
    grid: VoxelGridSpec = field(default_factory=VoxelGridSpec)
    background: str = "flat"
    background_color: tuple[float, float, float] = (0.0, 0.0, 0.0)
    raw_channels: int = 8
    noise_level: float = 1.0

    def __post_init__(self) -> None:
        for name in ("box_count", "box_length", "box_width", "box_height"):
            lo, hi = getattr(self, name)
            if lo > hi or lo < 0:
                raise _invalid(name, (lo, hi), f"scene.{name} must satisfy 0 ≤ lo ≤ hi, got {(lo, hi)}")
        if min(self.box_length[0], self.box_width[0], self.box_height[0]) <= 0:
            raise _invalid("box_length", self.box_length, "box extents must be positive")
        if self.camera_count < 1:
            raise _invalid("camera_count", self.camera_count, "need at least one camera")
        if self.image_height < 1 or self.image_width < 1:
            raise _invalid("image_height", (self.image_height, self.image_width), "image extents must be ≥ 1")
        if self.background not in BACKGROUND_MODES:
            raise reject(ErrConfig(
                key="scene.background",
                value=self.background,
                allowed=BACKGROUND_MODES,
                message=f"scene.background must be one of {BACKGROUND_MODES}, got {self.background!r}",
            ))
        if self.raw_channels < 4:
            raise _invalid("raw_channels", self.raw_channels, "raw grid needs occupancy + 3 colour channels")
        if self.noise_level < 0:
            raise _invalid("noise_level", self.noise_level, "noise_level must be ≥ 0")
        half_extent = (self.grid.upper - self.grid.lower)[:2] / 2.0
        reach = self.position_range + float(np.hypot(self.box_length[1], self.box_width[1])) / 2.0
        if reach > half_extent.min() + 1e-9:
            raise _invalid(
                "position_range", self.position_range,
                f"boxes could leave the perception range: reach {reach:.3f} m > half extent {half_extent.min():.3f} m",
            )
        height = (self.grid.upper - self.grid.lower)[2]
        if self.box_height[1] > height + 1e-9:
            raise _invalid("box_height", self.box_height, f"boxes taller than the grid ({height} m)")
        if self.ring_radius <= reach:
            raise _invalid("ring_radius", self.ring_radius, "cameras must sit outside the box placement area")

    @property
    def noise_channels(self) -> int:
        return self.raw_channels - 4
