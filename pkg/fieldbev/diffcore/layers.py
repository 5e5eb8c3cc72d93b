"""Parameter containers and the small layers built from them."""
from __future__ import annotations

from dataclasses import dataclass, fields, is_dataclass
from typing import Iterator

import numpy as np

from . import ops
from .tensor import DiffTensor


class ParameterTree:
    """
    Walks the dataclass fields of the concrete subclass and yields its
    learnable tensors with dotted names, in field order.

    Nested `ParameterTree` fields are walked recursively; non-tensor fields
    (strides, paddings) are skipped.

    Example:
        @dataclass
        class Head(ParameterTree):
            first: Dense
            second: Dense

        [n for n, _ in head.named_parameters("opacity")]
        # ['opacity.first.weight', 'opacity.first.bias', ...]
    """

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, DiffTensor]]:
        if not is_dataclass(self):
            raise TypeError(
                f"ParameterTree awaits dataclass but got {type(self).__name__}"
            )
        for f in fields(self):
            value = getattr(self, f.name)
            name = f"{prefix}.{f.name}" if prefix else f.name
            if isinstance(value, DiffTensor):
                yield name, value
            elif isinstance(value, ParameterTree):
                yield from value.named_parameters(name)

    def parameters(self) -> list[DiffTensor]:
        return [t for _, t in self.named_parameters()]

    def zero_grad(self) -> None:
        for t in self.parameters():
            t.zero_grad()


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> DiffTensor:
    bound = 1.0 / np.sqrt(fan_in)
    return DiffTensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


@dataclass(kw_only=True)
class Dense(ParameterTree):
    weight: DiffTensor  # (in, out)
    bias: DiffTensor  # (out,)

    @classmethod
    def init(cls, rng: np.random.Generator, n_in: int, n_out: int) -> "Dense":
        return cls(weight=uniform_init(rng, (n_in, n_out), n_in), bias=uniform_init(rng, (n_out,), n_in))

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.affine(x, self.weight, self.bias)


@dataclass(kw_only=True)
class TwoLayerHead(ParameterTree):
    """affine → softplus → affine, applied row-wise to (N, in) features."""

    first: Dense
    second: Dense

    @classmethod
    def init(cls, rng: np.random.Generator, n_in: int, hidden: int, n_out: int) -> "TwoLayerHead":
        return cls(first=Dense.init(rng, n_in, hidden), second=Dense.init(rng, hidden, n_out))

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return self.second(ops.softplus(self.first(x)))


@dataclass(kw_only=True)
class Conv(ParameterTree):
    weight: DiffTensor  # (out, in, k, k)
    bias: DiffTensor  # (out,)
    stride: int = 1

    @classmethod
    def init(cls, rng: np.random.Generator, n_in: int, n_out: int, kernel: int, stride: int = 1) -> "Conv":
        fan_in = n_in * kernel * kernel
        return cls(
            weight=uniform_init(rng, (n_out, n_in, kernel, kernel), fan_in),
            bias=uniform_init(rng, (n_out,), fan_in),
            stride=stride,
        )

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.conv2d(x, self.weight, self.bias, stride=self.stride)


@dataclass(kw_only=True)
class ConvTranspose(ParameterTree):
    """Stride-2 3×3 upsampling: doubles both spatial extents."""

    weight: DiffTensor  # (in, out, k, k)
    bias: DiffTensor  # (out,)

    @classmethod
    def init(cls, rng: np.random.Generator, n_in: int, n_out: int, kernel: int = 3) -> "ConvTranspose":
        fan_in = n_in * kernel * kernel
        return cls(
            weight=uniform_init(rng, (n_in, n_out, kernel, kernel), fan_in),
            bias=uniform_init(rng, (n_out,), fan_in),
        )

    def __call__(self, x: DiffTensor) -> DiffTensor:
        return ops.conv_transpose2d(x, self.weight, self.bias, stride=2, padding=1, output_padding=1)
