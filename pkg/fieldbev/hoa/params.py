from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diffcore import Conv, ConvTranspose, DiffTensor, ParameterTree, uniform_init

PYRAMID_LEVELS = 3


@dataclass(kw_only=True)
class HOAParams(ParameterTree):
    """
    Opacity fusion and height slice attention weights.

    Cross-attention projections act on height columns (Z → Z, no bias).
    `group_weight` / `group_bias` hold one scalar 1×1 convolution per
    pyramid level and height group, shape (levels, k). `down_*` are the
    stride-2 3×3 pyramid convolutions on Z channels, `up_*` the stride-2
    transposed convolutions that cascade the k attention maps back up.
    `mix` is only used by the concat-conv fusion strategy.
    """

    query: DiffTensor
    key: DiffTensor
    value: DiffTensor
    out: DiffTensor
    mix: Conv
    group_weight: DiffTensor
    group_bias: DiffTensor
    down_fine: Conv
    down_coarse: Conv
    up_coarse: ConvTranspose
    up_fine: ConvTranspose

    @classmethod
    def init(cls, rng: np.random.Generator, *, height: int, groups: int) -> "HOAParams":
        z, k = height, groups
        return cls(
            query=uniform_init(rng, (z, z), z),
            key=uniform_init(rng, (z, z), z),
            value=uniform_init(rng, (z, z), z),
            out=uniform_init(rng, (z, z), z),
            mix=Conv.init(rng, 2 * z, z, kernel=1),
            # identity group convolutions: the maps start as plain max-pools
            group_weight=DiffTensor(np.ones((PYRAMID_LEVELS, k)), requires_grad=True),
            group_bias=DiffTensor(np.zeros((PYRAMID_LEVELS, k)), requires_grad=True),
            down_fine=Conv.init(rng, z, z, kernel=3, stride=2),
            down_coarse=Conv.init(rng, z, z, kernel=3, stride=2),
            up_coarse=ConvTranspose.init(rng, k, k),
            up_fine=ConvTranspose.init(rng, k, k),
        )

    @property
    def groups(self) -> int:
        return self.group_weight.shape[1]


@dataclass(kw_only=True)
class BevParams(ParameterTree):
    """BEV reducer (1×1, C_v → C) and mask head (1×1, C → 1).

    Kept apart from `HOAParams`: the mask head trains with or without HOA.
    """

    reducer: Conv
    mask_head: Conv

    @classmethod
    def init(cls, rng: np.random.Generator, *, voxel_channels: int, bev_channels: int) -> "BevParams":
        return cls(
            reducer=Conv.init(rng, voxel_channels, bev_channels, kernel=1),
            mask_head=Conv.init(rng, bev_channels, 1, kernel=1),
        )
