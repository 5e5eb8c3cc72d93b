from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diffcore import Dense, ParameterTree, TwoLayerHead


@dataclass(kw_only=True)
class DecoderParams(ParameterTree):
    """
    Learnable weights of both radiance-field decoders, shared by every scene.

    `projection` is the per-voxel C_raw → C_v map producing F_v from a raw
    grid; the remaining heads are two-layer MLPs over one voxel feature
    vector each:

      - scale, rotation, opacity, color: the Gaussian heads (3, 4, 1, 3 outputs)
      - density, view_weight: the NeRF heads (1 and V outputs)
    """

    projection: Dense
    scale: TwoLayerHead
    rotation: TwoLayerHead
    opacity: TwoLayerHead
    color: TwoLayerHead
    density: TwoLayerHead
    view_weight: TwoLayerHead

    @classmethod
    def init(
            cls,
            rng: np.random.Generator,
            *,
            raw_channels: int,
            feature_channels: int,
            hidden: int,
            n_views: int,
    ) -> "DecoderParams":
        c, h = feature_channels, hidden
        return cls(
            projection=Dense.init(rng, raw_channels, c),
            scale=TwoLayerHead.init(rng, c, h, 3),
            rotation=TwoLayerHead.init(rng, c, h, 4),
            opacity=TwoLayerHead.init(rng, c, h, 1),
            color=TwoLayerHead.init(rng, c, h, 3),
            density=TwoLayerHead.init(rng, c, h, 1),
            view_weight=TwoLayerHead.init(rng, c, h, n_views),
        )

    def gaussian_heads(self) -> tuple[TwoLayerHead, ...]:
        return self.scale, self.rotation, self.opacity, self.color

    def nerf_heads(self) -> tuple[TwoLayerHead, ...]:
        return self.density, self.view_weight
