"""Dense float64 tensors with reverse-mode gradients.

Every op output remembers the op that produced it as a `TapeEntry`
(inputs, a backward closure, a global sequence number). `backward`
collects the entries reachable from a scalar root into a
`ComputationTape`, sorted by sequence number, and replays it in reverse:
execution order is a topological order, so each entry runs exactly once
after all of its consumers.
"""
from __future__ import annotations

import itertools
import weakref
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from ..adapters import reject
from ..failures import ErrShape

BackwardFn = Callable[[np.ndarray], Sequence["np.ndarray | None"]]

_sequence = itertools.count()
_recording: ContextVar[bool] = ContextVar("fieldbev_recording", default=True)


@dataclass(eq=False)
class TapeEntry:
    op: str
    inputs: tuple["DiffTensor", ...]
    output: "weakref.ReferenceType[DiffTensor]"
    backward: BackwardFn
    seq: int


@dataclass
class ComputationTape:
    """Executed operations reachable from one root, in execution order."""

    entries: list[TapeEntry] = field(default_factory=list)

    @classmethod
    def collect(cls, root: "DiffTensor") -> "ComputationTape":
        seen: set[int] = set()
        found: list[TapeEntry] = []
        stack = [root]
        while stack:
            tensor = stack.pop()
            entry = tensor._entry
            if entry is None or id(entry) in seen:
                continue
            seen.add(id(entry))
            found.append(entry)
            stack.extend(entry.inputs)
        found.sort(key=lambda e: e.seq)
        return cls(entries=found)

    def __len__(self) -> int:
        return len(self.entries)


class DiffTensor:
    """n-dimensional float64 value with an additive gradient accumulator."""

    __slots__ = ("values", "_grad", "requires_grad", "name", "_entry", "__weakref__")
    # numpy defers mixed ndarray/DiffTensor arithmetic to our reflected ops
    __array_priority__ = 1000

    def __init__(self, values, *, requires_grad: bool = False, name: str | None = None):
        self.values = np.array(values, dtype=np.float64)
        self._grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self._entry: TapeEntry | None = None

    @classmethod
    def _wrap(cls, values: np.ndarray) -> "DiffTensor":
        out = cls.__new__(cls)
        out.values = np.asarray(values, dtype=np.float64)
        out._grad = None
        out.requires_grad = False
        out.name = None
        out._entry = None
        return out

    @property
    def grad(self) -> np.ndarray:
        if self._grad is None:
            self._grad = np.zeros_like(self.values)
        return self._grad

    @grad.setter
    def grad(self, value: np.ndarray) -> None:
        self._grad = np.asarray(value, dtype=np.float64)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def is_leaf(self) -> bool:
        return self._entry is None

    def zero_grad(self) -> None:
        self._grad = None

    def item(self) -> float:
        return float(self.values.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.values

    def detach(self) -> "DiffTensor":
        return DiffTensor._wrap(self.values)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"DiffTensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # arithmetic sugar; the ops module owns the math
    def __add__(self, other): return _ops.add(self, other)
    def __radd__(self, other): return _ops.add(other, self)
    def __sub__(self, other): return _ops.sub(self, other)
    def __rsub__(self, other): return _ops.sub(other, self)
    def __mul__(self, other): return _ops.mul(self, other)
    def __rmul__(self, other): return _ops.mul(other, self)
    def __truediv__(self, other): return _ops.div(self, other)
    def __rtruediv__(self, other): return _ops.div(other, self)
    def __neg__(self): return _ops.neg(self)
    def __matmul__(self, other): return _ops.matmul(self, other)
    def __getitem__(self, key): return _ops.getitem(self, key)

    def reshape(self, *shape) -> "DiffTensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return _ops.reshape(self, shape)

    def transpose(self, *axes) -> "DiffTensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return _ops.transpose(self, axes or None)

    def sum(self, axis=None, keepdims: bool = False) -> "DiffTensor":
        return _ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "DiffTensor":
        return _ops.mean(self, axis=axis, keepdims=keepdims)


def as_tensor(value) -> DiffTensor:
    """Pass tensors through; wrap anything else as a constant."""
    if isinstance(value, DiffTensor):
        return value
    return DiffTensor._wrap(np.asarray(value, dtype=np.float64))


def is_recording() -> bool:
    return _recording.get()


@contextmanager
def no_grad() -> Iterator[None]:
    """Forward ops inside this block record nothing and produce constants."""
    token = _recording.set(False)
    try:
        yield
    finally:
        _recording.reset(token)


def record(op: str, values: np.ndarray, inputs: Sequence[DiffTensor], backward_fn: BackwardFn) -> DiffTensor:
    """Wrap an op result; attach a tape entry when any input needs gradients."""
    out = DiffTensor._wrap(values)
    if _recording.get() and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        out._entry = TapeEntry(
            op=op,
            inputs=tuple(inputs),
            output=weakref.ref(out),
            backward=backward_fn,
            seq=next(_sequence),
        )
    return out


def backward(root: DiffTensor) -> ComputationTape:
    """Accumulate d(root)/d(t) into `t.grad` for every reachable tensor."""
    if root.size != 1:
        raise reject(ErrShape(
            op="backward",
            shapes=(root.shape,),
            message=f"backward: root must be scalar, got shape {root.shape}",
        ))
    tape = ComputationTape.collect(root)
    if not root.requires_grad:
        return tape
    root.grad = root.grad + 1.0
    for entry in reversed(tape.entries):
        out = entry.output()
        if out is None or out._grad is None:
            continue
        grads = entry.backward(out._grad)
        for tensor, g in zip(entry.inputs, grads):
            if g is None or not tensor.requires_grad:
                continue
            tensor.grad = tensor.grad + g
    return tape


from . import ops as _ops  # noqa: E402  (ops imports DiffTensor from here)
