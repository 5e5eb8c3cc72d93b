"""Differentiable operations over `DiffTensor`.

Broadcasting is limited to scalar-with-tensor (size-1 operands); anything
else must be reshaped or `broadcast_to`-ed explicitly by the caller.
Convolutions use channel-first (C, H, W) layout without a batch axis.
"""
from __future__ import annotations

import builtins
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..adapters import reject
from ..failures import ErrShape
from .tensor import DiffTensor, as_tensor, record


def _shape_error(op: str, *shapes: tuple[int, ...], detail: str = "") -> Exception:
    text = " vs ".join(str(tuple(s)) for s in shapes)
    suffix = f" ({detail})" if detail else ""
    return reject(ErrShape(
        op=op,
        shapes=tuple(tuple(s) for s in shapes),
        message=f"{op}: incompatible shapes {text}{suffix}",
    ))


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    return np.asarray(g.sum()).reshape(shape)


def _pair(op: str, a, b) -> tuple[DiffTensor, DiffTensor, tuple[int, ...]]:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape == b.shape:
        return a, b, a.shape
    if b.size == 1:
        return a, b, a.shape
    if a.size == 1:
        return a, b, b.shape
    raise _shape_error(op, a.shape, b.shape)


# --------------------
# elementwise
# --------------------


def add(a, b) -> DiffTensor:
    a, b, _ = _pair("add", a, b)

    def _backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return record("add", a.values + b.values, (a, b), _backward)


def sub(a, b) -> DiffTensor:
    a, b, _ = _pair("sub", a, b)

    def _backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return record("sub", a.values - b.values, (a, b), _backward)


def mul(a, b) -> DiffTensor:
    a, b, _ = _pair("mul", a, b)

    def _backward(g):
        return _unbroadcast(g * b.values, a.shape), _unbroadcast(g * a.values, b.shape)

    return record("mul", a.values * b.values, (a, b), _backward)


def div(a, b) -> DiffTensor:
    a, b, _ = _pair("div", a, b)

    def _backward(g):
        ga = g / b.values
        gb = -g * a.values / (b.values * b.values)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return record("div", a.values / b.values, (a, b), _backward)


def neg(x) -> DiffTensor:
    x = as_tensor(x)
    return record("neg", -x.values, (x,), lambda g: (-g,))


def scale(x, factor: float) -> DiffTensor:
    x = as_tensor(x)
    factor = float(factor)
    return record("scale", x.values * factor, (x,), lambda g: (g * factor,))


def exp(x) -> DiffTensor:
    x = as_tensor(x)
    y = np.exp(x.values)
    return record("exp", y, (x,), lambda g: (g * y,))


def log(x) -> DiffTensor:
    x = as_tensor(x)
    return record("log", np.log(x.values), (x,), lambda g: (g / x.values,))


def abs(x) -> DiffTensor:
    x = as_tensor(x)
    return record("abs", np.abs(x.values), (x,), lambda g: (g * np.sign(x.values),))


def square(x) -> DiffTensor:
    x = as_tensor(x)
    return record("square", x.values * x.values, (x,), lambda g: (2.0 * x.values * g,))


def _sigmoid(v: np.ndarray) -> np.ndarray:
    z = np.exp(-np.abs(v))
    return np.where(v >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def sigmoid(x) -> DiffTensor:
    x = as_tensor(x)
    y = _sigmoid(x.values)
    return record("sigmoid", y, (x,), lambda g: (g * y * (1.0 - y),))


def softplus(x) -> DiffTensor:
    x = as_tensor(x)
    y = np.logaddexp(0.0, x.values)
    return record("softplus", y, (x,), lambda g: (g * _sigmoid(x.values),))


def clamp(x, lo: float, hi: float) -> DiffTensor:
    x = as_tensor(x)
    inside = (x.values >= lo) & (x.values <= hi)
    return record("clamp", np.clip(x.values, lo, hi), (x,), lambda g: (g * inside,))


# --------------------
# shape
# --------------------


def reshape(x, shape: Sequence[int]) -> DiffTensor:
    x = as_tensor(x)
    try:
        y = x.values.reshape(shape)
    except ValueError:
        raise _shape_error("reshape", x.shape, tuple(shape)) from None
    return record("reshape", y, (x,), lambda g: (g.reshape(x.shape),))


def transpose(x, axes: Sequence[int] | None = None) -> DiffTensor:
    x = as_tensor(x)
    axes = tuple(axes) if axes is not None else tuple(reversed(range(x.ndim)))
    inverse = tuple(np.argsort(axes))
    return record("transpose", x.values.transpose(axes), (x,), lambda g: (g.transpose(inverse),))


def broadcast_to(x, shape: Sequence[int]) -> DiffTensor:
    """Explicit numpy-rule broadcast; the gradient sums the copies back."""
    x = as_tensor(x)
    shape = tuple(shape)
    try:
        y = np.broadcast_to(x.values, shape).copy()
    except ValueError:
        raise _shape_error("broadcast_to", x.shape, shape) from None
    lead = len(shape) - x.ndim

    def _backward(g):
        g = g.sum(axis=tuple(range(lead))) if lead else g
        axes = tuple(i for i, n in enumerate(x.shape) if n == 1 and g.shape[i] != 1)
        if axes:
            g = g.sum(axis=axes, keepdims=True)
        return (g,)

    return record("broadcast_to", y, (x,), _backward)


def concat(tensors: Sequence, axis: int = 0) -> DiffTensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        y = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError:
        raise _shape_error("concat", *(t.shape for t in tensors), detail=f"axis {axis}") from None
    cuts = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def _backward(g):
        return tuple(np.split(g, cuts, axis=axis))

    return record("concat", y, tensors, _backward)


def getitem(x, key) -> DiffTensor:
    x = as_tensor(x)
    y = x.values[key]

    def _backward(g):
        gx = np.zeros_like(x.values)
        np.add.at(gx, key, g)
        return (gx,)

    return record("getitem", np.array(y, dtype=np.float64), (x,), _backward)


def gather(x, index: np.ndarray, fill: float = 0.0) -> DiffTensor:
    """Rows of `x` along axis 0 picked by `index`; negative entries give `fill`.

    Output shape is ``index.shape + x.shape[1:]``. Gradients of repeated
    rows add up.
    """
    x = as_tensor(x)
    index = np.asarray(index, dtype=np.int64)
    valid = index >= 0
    if x.shape[0] == 0:
        y = np.full(index.shape + x.shape[1:], fill, dtype=np.float64)
    else:
        y = x.values[np.where(valid, index, 0)]
    if not valid.all():
        y = y.copy()
        y[~valid] = fill

    def _backward(g):
        gx = np.zeros_like(x.values)
        np.add.at(gx, index[valid], g[valid])
        return (gx,)

    return record("gather", y, (x,), _backward)


# --------------------
# reductions
# --------------------


def _expand(g: np.ndarray, shape: tuple[int, ...], axis, keepdims: bool) -> np.ndarray:
    if axis is None:
        return np.broadcast_to(np.asarray(g).reshape((1,) * len(shape)), shape)
    axes = (axis,) if isinstance(axis, int) else tuple(axis)
    axes = tuple(a % len(shape) for a in axes)
    if not keepdims:
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape)


def sum(x, axis=None, keepdims: bool = False) -> DiffTensor:
    x = as_tensor(x)
    y = np.asarray(x.values.sum(axis=axis, keepdims=keepdims), dtype=np.float64)
    return record("sum", y, (x,), lambda g: (_expand(g, x.shape, axis, keepdims).copy(),))


def mean(x, axis=None, keepdims: bool = False) -> DiffTensor:
    x = as_tensor(x)
    y = np.asarray(x.values.mean(axis=axis, keepdims=keepdims), dtype=np.float64)
    count = x.size // builtins.max(y.size, 1) if axis is not None else x.size
    return record("mean", y, (x,), lambda g: (_expand(g, x.shape, axis, keepdims) / count,))


def max_pool(x, axis: int) -> DiffTensor:
    """Max over one axis; the gradient goes to the first (lowest index) maximum."""
    x = as_tensor(x)
    idx = np.argmax(x.values, axis=axis)
    y = np.take_along_axis(x.values, np.expand_dims(idx, axis), axis=axis).squeeze(axis)

    def _backward(g):
        gx = np.zeros_like(x.values)
        np.put_along_axis(gx, np.expand_dims(idx, axis), np.expand_dims(g, axis), axis=axis)
        return (gx,)

    return record("max_pool", y, (x,), _backward)


def softmax(x, axis: int = -1) -> DiffTensor:
    x = as_tensor(x)
    shifted = x.values - x.values.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def _backward(g):
        return (y * (g - (g * y).sum(axis=axis, keepdims=True)),)

    return record("softmax", y, (x,), _backward)


def l2_normalize(x, axis: int = -1, eps: float = 1e-12) -> DiffTensor:
    """x / (‖x‖ + eps); the eps keeps zero vectors finite (they map to 0)."""
    x = as_tensor(x)
    norm = np.sqrt((x.values * x.values).sum(axis=axis, keepdims=True))
    denom = norm + eps
    y = x.values / denom

    def _backward(g):
        dot = (g * x.values).sum(axis=axis, keepdims=True)
        unit = np.divide(x.values, norm, out=np.zeros_like(x.values), where=norm > 0)
        return (g / denom - unit * dot / (denom * denom),)

    return record("l2_normalize", y, (x,), _backward)


def cumprod_exclusive(x) -> DiffTensor:
    """Exclusive running product along the last axis: out[..., j] = prod(x[..., :j]).

    The backward pass is a reverse scan, so zeros in `x` are handled
    without division.
    """
    x = as_tensor(x)
    a = x.values
    y = np.ones_like(a)
    if a.shape[-1] > 1:
        y[..., 1:] = np.cumprod(a[..., :-1], axis=-1)

    def _backward(g):
        k = a.shape[-1]
        running = np.zeros(a.shape[:-1])
        ga = np.zeros_like(a)
        for j in range(k - 2, -1, -1):
            running = g[..., j + 1] + a[..., j + 1] * running
            ga[..., j] = y[..., j] * running
        return (ga,)

    return record("cumprod_exclusive", y, (x,), _backward)


# --------------------
# linear algebra and convolution
# --------------------


def matmul(a, b) -> DiffTensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise _shape_error("matmul", a.shape, b.shape)

    def _backward(g):
        return g @ b.values.T, a.values.T @ g

    return record("matmul", a.values @ b.values, (a, b), _backward)


def affine(x, weight, bias) -> DiffTensor:
    """Row-wise affine map: (N, I) @ (I, O) + (O,)."""
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if (x.ndim != 2 or weight.ndim != 2 or bias.ndim != 1
            or x.shape[1] != weight.shape[0] or weight.shape[1] != bias.shape[0]):
        raise _shape_error("affine", x.shape, weight.shape, bias.shape)

    def _backward(g):
        return g @ weight.values.T, x.values.T @ g, g.sum(axis=0)

    return record("affine", x.values @ weight.values + bias.values, (x, weight, bias), _backward)


def conv2d(x, weight, bias, stride: int = 1, padding: int | None = None) -> DiffTensor:
    """Cross-correlation of (C, H, W) with (O, C, kh, kw) weights, zero padding.

    `padding` defaults to kh // 2 ("same" size at stride 1).
    """
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if x.ndim != 3 or weight.ndim != 4 or weight.shape[1] != x.shape[0] or bias.shape != (weight.shape[0],):
        raise _shape_error("conv2d", x.shape, weight.shape, bias.shape)
    _, kh, kw = weight.shape[1:]
    p = kh // 2 if padding is None else padding
    c, h, w = x.shape
    xp = np.pad(x.values, ((0, 0), (p, p), (p, p)))
    cols = sliding_window_view(xp, (kh, kw), axis=(1, 2))[:, ::stride, ::stride]
    ho, wo = cols.shape[1], cols.shape[2]
    y = np.tensordot(weight.values, cols, axes=([1, 2, 3], [0, 3, 4])) + bias.values[:, None, None]

    def _backward(g):
        gw = np.tensordot(g, cols, axes=([1, 2], [1, 2]))
        gb = g.sum(axis=(1, 2))
        gcols = np.tensordot(weight.values, g, axes=([0], [0]))
        gxp = np.zeros_like(xp)
        for i in range(kh):
            for j in range(kw):
                gxp[:, i:i + stride * (ho - 1) + 1:stride, j:j + stride * (wo - 1) + 1:stride] += gcols[:, i, j]
        return gxp[:, p:p + h, p:p + w], gw, gb

    return record("conv2d", y, (x, weight, bias), _backward)


def conv_transpose2d(x, weight, bias, stride: int = 2, padding: int = 1, output_padding: int = 1) -> DiffTensor:
    """Transposed convolution of (C, H, W) with (C, O, kh, kw) weights.

    Output extent is (H - 1)·stride - 2·padding + kh + output_padding;
    the defaults double H and W for a 3×3 kernel.
    """
    x, weight, bias = as_tensor(x), as_tensor(weight), as_tensor(bias)
    if x.ndim != 3 or weight.ndim != 4 or weight.shape[0] != x.shape[0] or bias.shape != (weight.shape[1],):
        raise _shape_error("conv_transpose2d", x.shape, weight.shape, bias.shape)
    _, o, kh, kw = weight.shape
    _, h, w = x.shape
    full_h = (h - 1) * stride + kh + output_padding
    full_w = (w - 1) * stride + kw + output_padding
    ho, wo = full_h - 2 * padding, full_w - 2 * padding
    spread = np.tensordot(weight.values, x.values, axes=([0], [0]))
    full = np.zeros((o, full_h, full_w))
    for i in range(kh):
        for j in range(kw):
            full[:, i:i + stride * (h - 1) + 1:stride, j:j + stride * (w - 1) + 1:stride] += spread[:, i, j]
    y = full[:, padding:padding + ho, padding:padding + wo] + bias.values[:, None, None]

    def _backward(g):
        gfull = np.zeros((o, full_h, full_w))
        gfull[:, padding:padding + ho, padding:padding + wo] = g
        gspread = np.empty((o, kh, kw, h, w))
        for i in range(kh):
            for j in range(kw):
                gspread[:, i, j] = gfull[:, i:i + stride * (h - 1) + 1:stride, j:j + stride * (w - 1) + 1:stride]
        gx = np.tensordot(weight.values, gspread, axes=([1, 2, 3], [0, 1, 2]))
        gw = np.tensordot(x.values, gspread, axes=([1, 2], [3, 4]))
        return gx, gw, g.sum(axis=(1, 2))

    return record("conv_transpose2d", y, (x, weight, bias), _backward)
