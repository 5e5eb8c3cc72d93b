import numpy as np
import pytest

from fieldbev.diffcore import DiffTensor, as_tensor, central_differences, gradcheck, ops
from fieldbev.diffcore.tensor import record


def _broken_square(x):
    """x² with a deliberately wrong backward (x instead of 2x)."""
    x = as_tensor(x)
    return record("broken", x.values * x.values, (x,), lambda g: (g * x.values,))


# --------------------
# Tests for central_differences
# --------------------


def test_central_differences_of_quadratic():
    grad = central_differences(lambda x: ops.sum(ops.square(x)), np.array([1.0, -2.0]), 1e-6)
    assert np.allclose(grad, [2.0, -4.0], atol=1e-8)


def test_central_differences_leaves_its_input_untouched():
    point = np.array([0.3, 0.7])
    central_differences(lambda x: ops.sum(ops.exp(x)), point, 1e-6)
    assert np.array_equal(point, [0.3, 0.7])


# --------------------
# Tests for gradcheck
# --------------------


def test_correct_gradient_passes():
    assert gradcheck(lambda x: ops.sum(ops.sigmoid(x)), np.linspace(-2, 2, 5)) < 1e-8


def test_wrong_gradient_is_caught():
    fn = lambda x: ops.sum(_broken_square(x))
    assert gradcheck(fn, np.array([1.0, 2.0])) == pytest.approx(0.5, rel=1e-6)


def test_accepts_tensor_input_without_touching_its_grad():
    point = DiffTensor([0.5, 1.5], requires_grad=True)
    gradcheck(lambda x: ops.sum(ops.square(x)), point)
    assert np.array_equal(point.grad, np.zeros(2))


def test_zero_gradient_is_not_amplified():
    """Both gradients vanish: the 1e-12 floor keeps the ratio at zero."""
    assert gradcheck(lambda x: ops.sum(ops.mul(x, 0.0)), np.ones(3)) == 0.0
