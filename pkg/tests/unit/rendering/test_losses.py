from dataclasses import replace

import numpy as np
import pytest

from fieldbev.adapters import FieldBevError
from fieldbev.diffcore import DiffTensor
from fieldbev.rendering import (
    LossWeights, RenderOutput, combine, loss_mask, masked_l1_depth, masked_mse, masked_ssim, render_loss,
)
from fieldbev.scene_synth import generate_scene


@pytest.fixture
def toy() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Provide a 2×2 single-channel target, a prediction off by 0.5 on the masked pixel, and the mask."""
    gt = np.zeros((2, 2, 1))
    pred = np.array([[[0.5], [0.9]], [[0.1], [0.7]]])
    mask = np.array([[1.0, 0.0], [0.0, 0.0]])
    return gt, pred, mask


def outputs_like(scene, value: float) -> list[RenderOutput]:
    h, w = scene.masks2d.shape[1:]
    return [RenderOutput(image=DiffTensor(np.full((h, w, 3), value)), depth=DiffTensor(np.full((h, w), value)))]


# --------------------
# Tests for the masked terms
# --------------------


def test_masked_mse_toy(toy):
    gt, pred, mask = toy
    preds = [DiffTensor(pred) for _ in range(3)]
    assert masked_mse(preds, gt, mask).item() == pytest.approx(0.1875)


def test_masked_l1_depth_toy(toy):
    gt, pred, mask = toy
    loss = masked_l1_depth([DiffTensor(pred[..., 0])], gt[..., 0], mask, normalizer=2.0)
    assert loss.item() == pytest.approx(0.5 / 4 / 2.0)


def test_all_zero_mask_gives_zero(rng):
    gt = rng.uniform(size=(12, 12, 3))
    pred = DiffTensor(rng.uniform(size=(12, 12, 3)))
    mask = np.zeros((12, 12))
    assert masked_mse([pred], gt, mask).item() == 0.0
    assert masked_ssim([pred], gt, mask).item() == pytest.approx(0.0)
    assert masked_l1_depth([DiffTensor(gt[..., 0])], pred.values[..., 0], mask).item() == 0.0


def test_unmasked_pixels_do_not_matter(rng):
    gt = rng.uniform(size=(12, 12, 3))
    mask = np.zeros((12, 12))
    mask[3:8, 2:9] = 1.0
    pred = rng.uniform(size=(12, 12, 3))
    noisy = np.where(mask[..., None] > 0, pred, rng.uniform(size=pred.shape))
    for term in (masked_mse, masked_ssim):
        assert term([DiffTensor(pred)], gt, mask).item() == term([DiffTensor(noisy)], gt, mask).item()


def test_prediction_shape_must_match(toy):
    gt, _, mask = toy
    with pytest.raises(FieldBevError) as info:
        masked_mse([DiffTensor(np.zeros((2, 3, 1)))], gt, mask)
    assert info.value.first.op == "masked_mse"


def test_mask_must_fit_the_image():
    with pytest.raises(FieldBevError) as info:
        masked_mse([DiffTensor(np.zeros((2, 2, 3)))], np.zeros((2, 2, 3)), np.ones((3, 3)))
    assert info.value.first.op == "mask"


# --------------------
# Tests for weights and combine
# --------------------


def test_default_weights():
    w = LossWeights()
    assert (w.mse, w.ssim, w.l1, w.bce, w.dice) == (10.0, 1.0, 1.0, 10.0, 10.0)


def test_combine():
    w = LossWeights(mse=10.0, ssim=1.0, l1=1.0)
    assert combine(w, 0.01, 0.2, 0.05).item() == pytest.approx(0.35)


@pytest.mark.parametrize("field", ["mse", "ssim", "l1", "bce", "dice"])
def test_negative_weight_is_rejected(field):
    with pytest.raises(FieldBevError) as info:
        LossWeights(**{field: -1.0})
    assert info.value.first.key == f"loss.{field}"


def test_nan_weight_is_rejected():
    with pytest.raises(FieldBevError):
        LossWeights(mse=float("nan"))


# --------------------
# Tests for render_loss
# --------------------


def test_loss_mask_modes(small_scene):
    assert np.all(loss_mask(small_scene, 0, "scene") == 1.0)
    assert np.array_equal(loss_mask(small_scene, 1, "object"), small_scene.masks2d[1])
    with pytest.raises(FieldBevError) as info:
        loss_mask(small_scene, 0, "everything")
    assert info.value.first.allowed == ("scene", "object")


def test_object_mode_on_empty_scene_is_zero(small_scene_config):
    scene = generate_scene(replace(small_scene_config, box_count=(0, 0)))
    loss = render_loss(scene, [0, 1], [outputs_like(scene, 0.7)] * 2, LossWeights(), "object")
    assert loss.total.item() == pytest.approx(0.0, abs=1e-12)


def test_perfect_prediction_scores_zero(small_scene):
    preds = [
        [RenderOutput(image=DiffTensor(small_scene.gt_rgb[v]), depth=DiffTensor(small_scene.gt_depth[v]))]
        for v in (0, 2)
    ]
    loss = render_loss(small_scene, [0, 2], preds, LossWeights(), "scene")
    assert loss.mse.item() == 0.0
    assert loss.l1.item() == 0.0
    assert loss.ssim.item() == pytest.approx(0.0, abs=1e-9)


def test_components_average_over_views(small_scene):
    one = render_loss(small_scene, [0], [outputs_like(small_scene, 0.3)], LossWeights(), "scene")
    two = render_loss(small_scene, [0, 0], [outputs_like(small_scene, 0.3)] * 2, LossWeights(), "scene")
    assert two.mse.item() == pytest.approx(one.mse.item())
    assert two.total.item() == pytest.approx(one.total.item())


def test_depth_term_switches_off(small_scene):
    loss = render_loss(small_scene, [0], [outputs_like(small_scene, 0.3)], LossWeights(), "scene", depth=False)
    assert loss.l1.item() == 0.0
    assert loss.total.item() == pytest.approx(10.0 * loss.mse.item() + loss.ssim.item())


def test_depth_is_normalized_by_the_grid_diagonal(small_scene):
    gt = small_scene.gt_depth[0]
    pred = RenderOutput(image=DiffTensor(small_scene.gt_rgb[0]), depth=DiffTensor(gt + 1.0))
    loss = render_loss(small_scene, [0], [[pred]], LossWeights(), "scene")
    assert loss.l1.item() == pytest.approx(1.0 / small_scene.grid.diagonal)
