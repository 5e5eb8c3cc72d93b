from loguru import logger

__version__ = "0.1.0"

from .adapters import FieldBevError, failure_exception, reject
from .errors_models import Error, FailureEnvelope
from .failures import (
    ErrShape, ErrDivisibility, ErrConfig, ErrCheckpoint, ErrSampling, ErrNonFinite,
)
from .geometry import Camera, VoxelGridSpec, Box3D
from .scene_synth import SceneConfig, SyntheticScene, generate_scene
from .rf_decoder import DecoderParams, decode_gaussians, decode_nerf
from .rendering import FusionParams, LossWeights, RenderOutput, splat_render, volume_render, fuse, render_loss
from .hoa import HOAParams, BevParams, opacity_fusion, multiscale_hsa, mask_loss
from .pipeline import RunConfig, TrainState, train, evaluate, save_checkpoint, load_checkpoint

# library code stays silent until an application (or the CLI) enables it
logger.disable("fieldbev")

__all__ = [
    "__version__",
    "FieldBevError", "failure_exception", "reject",
    "Error", "FailureEnvelope",
    "ErrShape", "ErrDivisibility", "ErrConfig", "ErrCheckpoint", "ErrSampling", "ErrNonFinite",
    "Camera", "VoxelGridSpec", "Box3D",
    "SceneConfig", "SyntheticScene", "generate_scene",
    "DecoderParams", "decode_gaussians", "decode_nerf",
    "FusionParams", "LossWeights", "RenderOutput", "splat_render", "volume_render", "fuse", "render_loss",
    "HOAParams", "BevParams", "opacity_fusion", "multiscale_hsa", "mask_loss",
    "RunConfig", "TrainState", "train", "evaluate", "save_checkpoint", "load_checkpoint",
]
