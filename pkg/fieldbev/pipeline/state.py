from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..diffcore import ParameterTree
from ..hoa import BevParams, HOAParams
from ..rendering import FusionParams
from ..rf_decoder import DecoderParams
from .config import RunConfig


@dataclass(kw_only=True)
class ModelParams(ParameterTree):
    decoder: DecoderParams
    fusion: FusionParams
    hoa: HOAParams
    bev: BevParams


@dataclass(kw_only=True, eq=False)
class AdamMoments:
    """First and second moment buffers keyed by dotted parameter name."""

    first: dict[str, np.ndarray] = field(default_factory=dict)
    second: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: ParameterTree) -> "AdamMoments":
        named = list(params.named_parameters())
        return cls(
            first={name: np.zeros_like(t.values) for name, t in named},
            second={name: np.zeros_like(t.values) for name, t in named},
        )


@dataclass(kw_only=True, eq=False)
class TrainState:
    step: int
    params: ModelParams
    moments: AdamMoments
    rng: np.random.Generator

    def named_parameters(self):
        return self.params.named_parameters()


def init_train_state(cfg: RunConfig) -> TrainState:
    """Seeded initial state: parameters from one stream, view sampling from another."""
    init_rng = np.random.default_rng([cfg.seed, 2])
    z = cfg.grid.dims[2]
    params = ModelParams(
        decoder=DecoderParams.init(
            init_rng,
            raw_channels=cfg.scene.raw_channels,
            feature_channels=cfg.feature_channels,
            hidden=cfg.hidden,
            n_views=cfg.scene.camera_count,
        ),
        fusion=FusionParams.init(cfg.theta),
        hoa=HOAParams.init(init_rng, height=z, groups=cfg.k),
        bev=BevParams.init(init_rng, voxel_channels=cfg.feature_channels, bev_channels=cfg.bev_channels),
    )
    return TrainState(
        step=0,
        params=params,
        moments=AdamMoments.zeros_like(params),
        rng=np.random.default_rng([cfg.seed, 3]),
    )
