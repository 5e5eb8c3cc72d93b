import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fieldbev.adapters import FieldBevError
from fieldbev.diffcore import DiffTensor, backward, ops
from fieldbev.geometry import Camera, project_points, unproject
from fieldbev.rendering import disk_radius, splat_layout, splat_render
from fieldbev.rf_decoder import GaussianAttributes


@pytest.fixture
def cam() -> Camera:
    """Provide an identity-pose 4×4 camera looking down +z."""
    return Camera(fx=4.0, fy=4.0, cx=2.0, cy=2.0, rotation=np.eye(3), translation=np.zeros(3), width=4, height=4)


def gaussians(positions, opacity, colors, scales=None) -> GaussianAttributes:
    n = len(positions)
    return GaussianAttributes(
        positions=np.asarray(positions, dtype=np.float64).reshape(n, 3),
        scales=DiffTensor(np.ones((n, 3)) if scales is None else scales),
        rotations=DiffTensor(np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))),
        opacity=DiffTensor(np.asarray(opacity, dtype=np.float64).reshape(n, 1)),
        colors=DiffTensor(np.asarray(colors, dtype=np.float64).reshape(n, 3)),
        dims=(n, 1, 1),
    )


def brute_force(g: GaussianAttributes, cam: Camera, background: np.ndarray):
    """Direct per-pixel evaluation of the front-to-back compositing sum."""
    uv, _, in_front = project_points(g.positions, cam)
    dist = np.linalg.norm(g.positions - cam.center, axis=1)
    image = np.zeros((cam.height, cam.width, 3))
    depth = np.zeros((cam.height, cam.width))
    for i in range(cam.height):
        for j in range(cam.width):
            hits = [
                n for n in range(len(dist))
                if in_front[n] and 0 <= uv[n, 0] < cam.width and 0 <= uv[n, 1] < cam.height
                and int(np.floor(uv[n, 0])) == j and int(np.floor(uv[n, 1])) == i
            ]
            hits.sort(key=lambda n: dist[n])
            transmittance = 1.0
            for n in hits:
                o = g.opacity.values[n, 0]
                image[i, j] += g.colors.values[n] * o * transmittance
                depth[i, j] += dist[n] * o * transmittance
                transmittance *= 1.0 - o
            image[i, j] += transmittance * background[i, j]
    return image, depth


# --------------------
# Tests for splat_render
# --------------------


def test_no_gaussians_give_background(cam):
    g = gaussians(np.zeros((0, 3)), np.zeros(0), np.zeros((0, 3)))
    out = splat_render(g, cam, background=(0.1, 0.2, 0.3))
    assert np.allclose(out.image.values, [0.1, 0.2, 0.3])
    assert not out.depth.values.any()


def test_gaussians_behind_camera_are_ignored(cam):
    g = gaussians([[0.0, 0.0, -3.0]], [1.0], [[1.0, 0.0, 0.0]])
    out = splat_render(g, cam)
    assert not out.image.values.any()
    assert not out.depth.values.any()


def test_opaque_gaussian_shows_its_colour_and_distance(cam):
    p = unproject(1.5, 2.5, 3.0, cam)
    g = gaussians([p], [1.0], [[0.2, 0.4, 0.6]])
    out = splat_render(g, cam, background=(1.0, 1.0, 1.0))
    assert np.allclose(out.image.values[2, 1], [0.2, 0.4, 0.6])
    assert out.depth.values[2, 1] == pytest.approx(np.linalg.norm(p))
    assert np.allclose(out.image.values[0, 0], 1.0)


def test_two_half_opaque_gaussians_composite_front_to_back(cam):
    near, far = unproject(2.5, 2.5, 2.0, cam), unproject(2.5, 2.5, 5.0, cam)
    g = gaussians([far, near], [0.5, 0.5], [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]])
    out = splat_render(g, cam)
    z1, z2 = np.linalg.norm(near), np.linalg.norm(far)
    assert out.depth.values[2, 2] == pytest.approx(0.5 * z1 + 0.25 * z2)
    assert np.allclose(out.image.values[2, 2], [0.5, 0.25, 0.0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**20), count=st.integers(min_value=1, max_value=5))
def test_matches_brute_force_oracle(seed, count):
    cam = Camera(fx=4.0, fy=4.0, cx=2.0, cy=2.0, rotation=np.eye(3), translation=np.zeros(3), width=4, height=4)
    rng = np.random.default_rng(seed)
    # crowd a few pixels so most of them stack contributors
    positions = np.stack([
        unproject(rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.5), rng.uniform(1.0, 6.0), cam) for _ in range(count)
    ])
    g = gaussians(positions, rng.uniform(0, 1, size=count), rng.uniform(0, 1, size=(count, 3)))
    background = rng.uniform(0, 1, size=(4, 4, 3))
    out = splat_render(g, cam, background=background)
    image, depth = brute_force(g, cam, background)
    assert np.max(np.abs(out.image.values - image)) <= 1e-12
    assert np.max(np.abs(out.depth.values - depth)) <= 1e-12


def test_accumulated_weight_keeps_image_in_range(cam, rng):
    positions = np.stack([unproject(2.2, 1.7, z, cam) for z in (1.0, 2.0, 3.0, 4.0)])
    g = gaussians(positions, rng.uniform(size=4), rng.uniform(size=(4, 3)))
    image = splat_render(g, cam, background=np.ones((4, 4, 3))).image.values
    assert np.all((image >= 0.0) & (image <= 1.0 + 1e-12))


def test_unknown_footprint_is_rejected(cam):
    g = gaussians([[0.0, 0.0, 3.0]], [0.5], [[1.0, 1.0, 1.0]])
    with pytest.raises(FieldBevError) as info:
        splat_render(g, cam, footprint="ellipse")
    assert info.value.first.allowed == ("point", "disk")


# --------------------
# Tests for the layouts
# --------------------


def test_layout_sorts_by_distance_and_pads(cam):
    positions = np.stack([unproject(0.5, 0.5, z, cam) for z in (4.0, 1.0, 2.0)])
    layout = splat_layout(positions, cam)
    assert layout.depth_capacity == 3
    assert layout.slots[0].tolist() == [1, 2, 0]
    assert np.all(layout.slots[1:] == -1)


def test_cached_layout_gives_identical_render(cam, rng):
    positions = np.stack([unproject(*rng.uniform(0, 4, size=2), 3.0, cam) for _ in range(4)])
    g = gaussians(positions, rng.uniform(size=4), rng.uniform(size=(4, 3)))
    fresh = splat_render(g, cam)
    cached = splat_render(g, cam, layout=splat_layout(positions, cam))
    assert np.array_equal(fresh.image.values, cached.image.values)


def test_point_footprint_gives_scales_no_gradient(cam):
    g = gaussians([unproject(2.5, 2.5, 3.0, cam)], [0.5], [[1.0, 0.0, 0.0]])
    g.scales = DiffTensor(np.ones((1, 3)), requires_grad=True)
    g.opacity.requires_grad = True
    backward(ops.sum(splat_render(g, cam).image))
    assert not g.scales.grad.any()
    assert g.opacity.grad.any()


# --------------------
# Tests for the disk footprint
# --------------------


def test_disk_radius_is_clamped(cam):
    scales = DiffTensor([[0.01, 0.01, 0.01], [1.0, 1.0, 1.0], [100.0, 100.0, 100.0]])
    r = disk_radius(scales, np.array([2.0, 2.0, 2.0]), cam).values
    assert r.tolist() == pytest.approx([0.5, 2.0, 6.0])


def test_disk_spreads_over_neighbouring_pixels(cam):
    g = gaussians([unproject(2.0, 2.0, 2.0, cam)], [1.0], [[1.0, 1.0, 1.0]], scales=np.full((1, 3), 0.5))
    point = splat_render(g, cam).image.values[..., 0]
    disk = splat_render(g, cam, footprint="disk").image.values[..., 0]
    assert (point > 0).sum() == 1
    assert (disk > 0).sum() == 4
    # radius 1 px: the four centres around the projection sit at d² = 0.5
    assert np.allclose(disk[1:3, 1:3], np.exp(-0.25))


def test_disk_footprint_trains_scales(cam):
    g = gaussians([unproject(2.2, 1.9, 2.0, cam)], [0.8], [[1.0, 0.0, 0.0]])
    g.scales = DiffTensor(np.full((1, 3), 0.8), requires_grad=True)
    backward(ops.sum(splat_render(g, cam, footprint="disk").image))
    assert g.scales.grad.any()
