import numpy as np
import pytest

from fieldbev.geometry import Box3D, Camera, look_at_camera
from fieldbev.scene_synth.raycast import cast, ray_box_distance, raycast_reference


@pytest.fixture
def cam() -> Camera:
    """Provide an identity-pose 16×16 camera looking down +z."""
    return Camera(fx=10.0, fy=10.0, cx=8.0, cy=8.0, rotation=np.eye(3), translation=np.zeros(3), width=16, height=16)


@pytest.mark.parametrize(
    "origin, direction, expected",
    [
        pytest.param((0, 0, -5), (0, 0, 1), 4.0, id="front-face"),
        pytest.param((0, 0, 0), (1, 0, 0), 1.0, id="inside-exit"),
        pytest.param((0, 5, -5), (0, 0, 1), np.inf, id="parallel-miss"),
        pytest.param((0, 0, 5), (0, 0, 1), np.inf, id="box-behind"),
    ],
)
def test_ray_box_distance(origin, direction, expected):
    box = Box3D(center=(0.0, 0.0, 0.0), size=(2.0, 2.0, 2.0))
    t = ray_box_distance(np.asarray(origin, float), np.asarray([direction], float), box)
    assert t[0] == pytest.approx(expected)


def test_yawed_box_distance():
    box = Box3D(center=(0.0, 0.0, 0.0), size=(4.0, 2.0, 2.0), yaw=np.pi / 2)
    # long side now along y: a ray down -y from y=5 hits at y=2
    t = ray_box_distance(np.array([0.0, 5.0, 0.0]), np.array([[0.0, -1.0, 0.0]]), box)
    assert t[0] == pytest.approx(3.0)


def test_empty_scene_is_background_with_zero_depth(cam):
    background = np.full((16, 16, 3), 0.25)
    rgb, depth = cast([], cam, background)
    assert np.array_equal(rgb, background)
    assert not depth.any()


def test_nearer_box_wins(cam):
    near = Box3D(center=(0.0, 0.0, 5.0), size=(1.0, 1.0, 1.0), color=(1.0, 0.0, 0.0))
    far = Box3D(center=(0.0, 0.0, 9.0), size=(4.0, 4.0, 1.0), color=(0.0, 1.0, 0.0))
    rgb, depth = cast([far, near], cam, np.zeros((16, 16, 3)))
    centre_ray = np.array([0.5, 0.5, 10.0])
    assert rgb[8, 8] == pytest.approx([1.0, 0.0, 0.0])
    # distance along the ray, not the optical axis
    assert depth[8, 8] == pytest.approx(4.5 * np.linalg.norm(centre_ray) / 10.0)
    assert rgb[8, 6] == pytest.approx([0.0, 1.0, 0.0])


def test_reference_matches_scene_ground_truth(small_scene):
    rgb, depth = raycast_reference(small_scene, small_scene.cameras[1])
    assert np.array_equal(rgb, small_scene.gt_rgb[1])
    assert np.array_equal(depth, small_scene.gt_depth[1])


def test_reference_renders_novel_camera(small_scene):
    cam = look_at_camera((0.0, 12.0, 6.0), (0.0, 0.0, 1.0), width=16, height=16)
    rgb, depth = raycast_reference(small_scene, cam)
    assert rgb.shape == (16, 16, 3)
    assert (depth > 0).any()
