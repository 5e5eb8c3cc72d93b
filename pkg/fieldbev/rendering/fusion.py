from __future__ import annotations

from dataclasses import dataclass

from ..adapters import reject
from ..diffcore import DiffTensor, ParameterTree, ops
from ..failures import ErrShape
from .output import RenderOutput


@dataclass(kw_only=True)
class FusionParams(ParameterTree):
    """α = sigmoid(θ), β = 1 − α: the sum is exact for every θ."""

    theta: DiffTensor  # scalar logit

    @classmethod
    def init(cls, theta: float = 0.0) -> "FusionParams":
        return cls(theta=DiffTensor(theta, requires_grad=True))

    def alpha(self) -> DiffTensor:
        return ops.sigmoid(self.theta)

    @property
    def alpha_value(self) -> float:
        return self.alpha().item()

    @property
    def beta_value(self) -> float:
        return 1.0 - self.alpha_value


def blend(a: DiffTensor, b: DiffTensor, alpha: DiffTensor) -> DiffTensor:
    return alpha * a + (1.0 - alpha) * b


def fuse(a: RenderOutput, b: RenderOutput, fp: FusionParams) -> RenderOutput:
    """α·a + β·b for image and depth alike."""
    if a.image.shape != b.image.shape or a.depth.shape != b.depth.shape:
        raise reject(ErrShape(
            op="fuse",
            shapes=(a.image.shape, b.image.shape),
            message=f"fuse: render outputs differ in shape, {a.image.shape} vs {b.image.shape}",
        ))
    alpha = fp.alpha()
    return RenderOutput(
        image=blend(a.image, b.image, alpha),
        depth=blend(a.depth, b.depth, alpha),
        fallbacks=a.fallbacks + b.fallbacks,
    )
