"""Voxel features → Gaussian and NeRF attributes.

Every head sees one voxel's feature vector; rows follow the flat C-order
voxel index of `voxel_centers`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..adapters import reject
from ..diffcore import DiffTensor, as_tensor, ops
from ..failures import ErrShape
from ..geometry import VoxelGridSpec, voxel_centers
from .params import DecoderParams

# rows whose rotation output has (numerically) zero norm
DEGENERATE_NORM = 1e-12
_IDENTITY_QUATERNION = np.array([1.0, 0.0, 0.0, 0.0])


@dataclass(kw_only=True, eq=False)
class GaussianAttributes:
    positions: np.ndarray = field(repr=False)  # (N, 3), fixed voxel centres
    scales: DiffTensor  # (N, 3) > 0
    rotations: DiffTensor  # (N, 4) unit quaternions
    opacity: DiffTensor  # (N, 1) in (0, 1)
    colors: DiffTensor  # (N, 3) in (0, 1)
    dims: tuple[int, int, int]

    @property
    def count(self) -> int:
        return self.positions.shape[0]


@dataclass(kw_only=True, eq=False)
class NerfAttributes:
    density: DiffTensor  # (N, 1) ≥ 0
    view_weight: DiffTensor  # (N, V) logits
    opacity: DiffTensor  # (N, 1) = 1 - exp(-density)
    dims: tuple[int, int, int]

    @property
    def count(self) -> int:
        return self.density.shape[0]


def project_features(raw_grid: np.ndarray | DiffTensor, params: DecoderParams) -> DiffTensor:
    """(C_raw, X, Y, Z) raw grid → F_v (C_v, X, Y, Z) through the learnable 1×1×1 projection."""
    raw = as_tensor(raw_grid)
    if raw.ndim != 4:
        raise reject(ErrShape(
            op="project_features",
            shapes=(raw.shape,),
            message=f"project_features: raw grid must be (C, X, Y, Z), got {raw.shape}",
        ))
    c, *dims = raw.shape
    rows = raw.reshape(c, -1).transpose()
    projected = params.projection(rows)
    return projected.transpose().reshape(projected.shape[1], *dims)


def _feature_rows(features: DiffTensor) -> tuple[DiffTensor, tuple[int, int, int]]:
    if features.ndim != 4:
        raise reject(ErrShape(
            op="decode",
            shapes=(features.shape,),
            message=f"decode: voxel features must be (C_v, X, Y, Z), got {features.shape}",
        ))
    c, *dims = features.shape
    return features.reshape(c, -1).transpose(), tuple(dims)


def _unit_quaternions(raw: DiffTensor) -> DiffTensor:
    norms = np.linalg.norm(raw.values, axis=1)
    degenerate = norms <= DEGENERATE_NORM
    unit = ops.l2_normalize(raw, axis=1, eps=DEGENERATE_NORM)
    if degenerate.any():
        # zero rows normalise to 0; give them the identity rotation
        unit = unit + np.where(degenerate[:, None], _IDENTITY_QUATERNION, 0.0)
    return unit


def decode_gaussians(features: DiffTensor, params: DecoderParams, spec: VoxelGridSpec) -> GaussianAttributes:
    rows, dims = _feature_rows(features)
    if dims != spec.dims:
        raise reject(ErrShape(
            op="decode_gaussians",
            shapes=(dims, spec.dims),
            message=f"decode_gaussians: feature grid {dims} does not match grid spec {spec.dims}",
        ))
    return GaussianAttributes(
        positions=voxel_centers(spec),
        scales=ops.softplus(params.scale(rows)),
        rotations=_unit_quaternions(params.rotation(rows)),
        opacity=ops.sigmoid(params.opacity(rows)),
        colors=ops.sigmoid(params.color(rows)),
        dims=dims,
    )


def decode_nerf(features: DiffTensor, params: DecoderParams) -> NerfAttributes:
    rows, dims = _feature_rows(features)
    density = ops.softplus(params.density(rows))
    return NerfAttributes(
        density=density,
        view_weight=params.view_weight(rows),
        opacity=1.0 - ops.exp(-density),
        dims=dims,
    )


def opacity_volume(attrs: GaussianAttributes | NerfAttributes) -> DiffTensor:
    """(N, 1) opacity back to an (X, Y, Z) volume in voxel index order."""
    return attrs.opacity.reshape(attrs.dims)
