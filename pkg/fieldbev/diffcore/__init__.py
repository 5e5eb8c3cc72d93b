from .tensor import DiffTensor, ComputationTape, TapeEntry, as_tensor, backward, no_grad, is_recording
from .gradcheck import gradcheck, central_differences
from .layers import ParameterTree, Dense, TwoLayerHead, Conv, ConvTranspose, uniform_init
from . import ops

__all__ = [
    "DiffTensor", "ComputationTape", "TapeEntry",
    "as_tensor", "backward", "no_grad", "is_recording",
    "gradcheck", "central_differences",
    "ParameterTree", "Dense", "TwoLayerHead", "Conv", "ConvTranspose", "uniform_init",
    "ops",
]
