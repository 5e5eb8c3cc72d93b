from .params import DecoderParams
from .decode import (
    GaussianAttributes, NerfAttributes,
    project_features, decode_gaussians, decode_nerf, opacity_volume,
)

__all__ = [
    "DecoderParams",
    "GaussianAttributes", "NerfAttributes",
    "project_features", "decode_gaussians", "decode_nerf", "opacity_volume",
]
