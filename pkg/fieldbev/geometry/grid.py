from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adapters import reject
from ..failures import ErrConfig


@dataclass(kw_only=True, frozen=True)
class VoxelGridSpec:
    """Regular lattice over the perception range.

    `origin` is the min corner (meters); voxel (i, j, k) spans
    origin + voxel_size·[i, i+1) × [j, j+1) × [k, k+1). Flat voxel index
    order is C order over (X, Y, Z).
    """

    origin: tuple[float, float, float] = (-8.0, -8.0, 0.0)
    voxel_size: float = 0.5
    dims: tuple[int, int, int] = (32, 32, 16)

    def __post_init__(self) -> None:
        if self.voxel_size <= 0:
            raise reject(ErrConfig(
                key="grid.voxel_size",
                value=str(self.voxel_size),
                message=f"voxel_size must be positive, got {self.voxel_size}",
            ))
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise reject(ErrConfig(
                key="grid.dims",
                value=str(self.dims),
                message=f"grid dims must be three counts ≥ 1, got {self.dims}",
            ))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "dims", tuple(int(v) for v in self.dims))

    @property
    def n_voxels(self) -> int:
        x, y, z = self.dims
        return x * y * z

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.origin)

    @property
    def upper(self) -> np.ndarray:
        return self.lower + self.voxel_size * np.asarray(self.dims, dtype=np.float64)

    @property
    def diagonal(self) -> float:
        """Length of the perception-range diagonal (depth normaliser)."""
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return np.all((points >= self.lower) & (points <= self.upper), axis=-1)

    def voxel_index(self, points: np.ndarray) -> np.ndarray:
        """Flat voxel index of each point, -1 outside the grid."""
        cell = np.floor((np.asarray(points) - self.lower) / self.voxel_size).astype(np.int64)
        dims = np.asarray(self.dims)
        inside = np.all((cell >= 0) & (cell < dims), axis=-1)
        cell = np.clip(cell, 0, dims - 1)
        flat = (cell[..., 0] * dims[1] + cell[..., 1]) * dims[2] + cell[..., 2]
        return np.where(inside, flat, -1)


def voxel_centers(spec: VoxelGridSpec) -> np.ndarray:
    """(X·Y·Z, 3) world centres, origin + voxel_size·(i+0.5, j+0.5, k+0.5)."""
    axes = [np.arange(n) + 0.5 for n in spec.dims]
    i, j, k = np.meshgrid(*axes, indexing="ij")
    cells = np.stack([i, j, k], axis=-1).reshape(-1, 3)
    return spec.lower + spec.voxel_size * cells


def bev_cell_centers(spec: VoxelGridSpec) -> np.ndarray:
    """(X, Y, 2) ground-plane centres of the BEV cells."""
    x = spec.origin[0] + spec.voxel_size * (np.arange(spec.dims[0]) + 0.5)
    y = spec.origin[1] + spec.voxel_size * (np.arange(spec.dims[1]) + 0.5)
    gx, gy = np.meshgrid(x, y, indexing="ij")
    return np.stack([gx, gy], axis=-1)
