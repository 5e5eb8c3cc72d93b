from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adapters import reject
from ..failures import ErrConfig

_CORNER_SIGNS = np.array(
    [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
    dtype=np.float64,
)


@dataclass(kw_only=True, frozen=True)
class Box3D:
    """Oriented box: `size` = (length along local x, width along local y, height).

    `yaw` rotates the local frame about world z.
    """

    center: tuple[float, float, float]
    size: tuple[float, float, float]
    yaw: float = 0.0
    color: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        if min(self.size) <= 0:
            raise reject(ErrConfig(
                key="box.size",
                value=str(self.size),
                message=f"box size components must be positive, got {self.size}",
            ))
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "size", tuple(float(v) for v in self.size))
        object.__setattr__(self, "color", tuple(float(v) for v in self.color))
        object.__setattr__(self, "yaw", float(self.yaw))

    @property
    def rotation(self) -> np.ndarray:
        """Local-to-world rotation."""
        c, s = np.cos(self.yaw), np.sin(self.yaw)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    @property
    def half(self) -> np.ndarray:
        return np.asarray(self.size) / 2.0

    def corners(self) -> np.ndarray:
        """(8, 3) world corners."""
        return (_CORNER_SIGNS * self.half) @ self.rotation.T + np.asarray(self.center)

    def to_local(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) - np.asarray(self.center)) @ self.rotation

    def contains(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        local = self.to_local(points)
        return np.all(np.abs(local) <= self.half + tol, axis=-1)

    def footprint_contains(self, xy: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Ground-plane containment in the yaw-rotated length × width rectangle."""
        d = np.asarray(xy, dtype=np.float64) - np.asarray(self.center[:2])
        c, s = np.cos(self.yaw), np.sin(self.yaw)
        along = d[..., 0] * c + d[..., 1] * s
        across = -d[..., 0] * s + d[..., 1] * c
        return (np.abs(along) <= self.half[0] + tol) & (np.abs(across) <= self.half[1] + tol)

    @property
    def footprint_radius(self) -> float:
        return float(np.hypot(self.half[0], self.half[1]))
