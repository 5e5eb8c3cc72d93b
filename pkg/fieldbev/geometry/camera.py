"""Pinhole cameras: world-to-camera rotation R and translation t, p_cam = R·p + t.

Camera axes: x right, y down, z forward. Pixel (row i, column j) covers
u ∈ [j, j+1), v ∈ [i, i+1); its centre is (j + 0.5, i + 0.5).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..adapters import reject
from ..failures import ErrConfig

BEHIND_EPS = 1e-6


@dataclass(kw_only=True, frozen=True, eq=False)
class Camera:
    fx: float
    fy: float
    cx: float
    cy: float
    rotation: np.ndarray = field(repr=False)
    translation: np.ndarray = field(repr=False)
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.fx <= 0 or self.fy <= 0:
            raise reject(ErrConfig(
                key="camera.focal",
                value=f"{self.fx}, {self.fy}",
                message=f"camera focal lengths must be positive, got fx={self.fx}, fy={self.fy}",
            ))
        rotation = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        if not np.allclose(rotation.T @ rotation, np.eye(3), rtol=0.0, atol=1e-9):
            raise reject(ErrConfig(
                key="camera.rotation",
                message="camera rotation is not orthonormal (RᵀR ≠ I within 1e-9)",
            ))
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=np.float64).reshape(3))

    @property
    def center(self) -> np.ndarray:
        """Camera centre in world coordinates."""
        return -self.rotation.T @ self.translation

    def to_camera(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation


class Projection(NamedTuple):
    u: float
    v: float
    depth: float
    behind: bool


def project(point, cam: Camera) -> Projection:
    """Project one world point; `behind` flags depth ≤ 1e-6 (callers skip it)."""
    x, y, z = cam.to_camera(np.asarray(point, dtype=np.float64).reshape(1, 3))[0]
    if z <= BEHIND_EPS:
        return Projection(u=float("nan"), v=float("nan"), depth=float(z), behind=True)
    return Projection(u=cam.fx * x / z + cam.cx, v=cam.fy * y / z + cam.cy, depth=float(z), behind=False)


def project_points(points: np.ndarray, cam: Camera) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised `project`: returns (uv (N, 2), depth (N,), in_front (N,))."""
    pc = cam.to_camera(points)
    z = pc[:, 2]
    in_front = z > BEHIND_EPS
    safe = np.where(in_front, z, 1.0)
    uv = np.stack([cam.fx * pc[:, 0] / safe + cam.cx, cam.fy * pc[:, 1] / safe + cam.cy], axis=1)
    uv[~in_front] = np.nan
    return uv, z, in_front


def unproject(u: float, v: float, depth: float, cam: Camera) -> np.ndarray:
    """World point that projects to (u, v) at camera-space depth `depth`."""
    pc = np.array([(u - cam.cx) / cam.fx * depth, (v - cam.cy) / cam.fy * depth, depth])
    return cam.rotation.T @ (pc - cam.translation)


def camera_rays(cam: Camera) -> tuple[np.ndarray, np.ndarray]:
    """Origin (3,) and unit world directions (H, W, 3) through pixel centres."""
    j, i = np.meshgrid(np.arange(cam.width) + 0.5, np.arange(cam.height) + 0.5)
    dirs_cam = np.stack([(j - cam.cx) / cam.fx, (i - cam.cy) / cam.fy, np.ones_like(j)], axis=-1)
    dirs = dirs_cam @ cam.rotation
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    return cam.center, dirs


def look_at_camera(
        eye,
        target,
        *,
        width: int,
        height: int,
        fov_deg: float = 60.0,
        up=(0.0, 0.0, 1.0),
) -> Camera:
    """Camera at `eye` looking at `target`, horizontal field of view `fov_deg`."""
    eye = np.asarray(eye, dtype=np.float64)
    forward = np.asarray(target, dtype=np.float64) - eye
    forward /= np.linalg.norm(forward)
    right = np.cross(forward, np.asarray(up, dtype=np.float64))
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    rotation = np.stack([right, down, forward])
    focal = width / (2.0 * np.tan(np.radians(fov_deg) / 2.0))
    return Camera(
        fx=focal,
        fy=focal,
        cx=width / 2.0,
        cy=height / 2.0,
        rotation=rotation,
        translation=-rotation @ eye,
        width=width,
        height=height,
    )
