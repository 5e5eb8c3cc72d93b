from dataclasses import replace

import numpy as np
import pytest
from loguru import logger

from fieldbev.geometry import VoxelGridSpec
from fieldbev.pipeline import RunConfig, render_config
from fieldbev.scene_synth import SceneConfig, SyntheticScene, generate_scene

SMALL_GRID = VoxelGridSpec(origin=(-8.0, -8.0, 0.0), voxel_size=2.0, dims=(8, 8, 4))


@pytest.fixture
def small_scene_config() -> SceneConfig:
    """Provide a 3-camera, 16×16-pixel scene over an 8×8×4 grid."""
    return SceneConfig(
        seed=1,
        grid=SMALL_GRID,
        image_height=16,
        image_width=16,
        camera_count=3,
        box_count=(1, 2),
    )


@pytest.fixture
def small_scene(small_scene_config) -> SyntheticScene:
    """Provide the generated scene of `small_scene_config`."""
    return generate_scene(small_scene_config)


@pytest.fixture
def make_run_config(small_scene_config):
    """Provide a factory for tiny run configs; keyword overrides win."""

    def make(**overrides) -> RunConfig:
        base = RunConfig(
            seed=1,
            scene=small_scene_config,
            feature_channels=4,
            hidden=8,
            bev_channels=4,
            k=2,
            warmup_steps=2,
            steps=4,
            train_scenes=2,
            heldout_scenes=1,
            metrics_every=1,
        )
        return replace(base, **overrides)

    return make


@pytest.fixture
def run_config(make_run_config) -> RunConfig:
    """Provide the default tiny run config."""
    return make_run_config()


@pytest.fixture
def config_file(tmp_path, run_config):
    """Provide the tiny run config written as a key = value file."""
    path = tmp_path / "run.cfg"
    path.write_text(render_config(run_config), encoding="utf-8")
    return path


@pytest.fixture
def rng() -> np.random.Generator:
    """Provide a seeded generator."""
    return np.random.default_rng(0)


@pytest.fixture
def log_messages() -> list[str]:
    """Collect loguru messages emitted while the test runs."""
    messages: list[str] = []
    logger.enable("fieldbev")
    handler = logger.add(lambda message: messages.append(message.record["message"]), level="DEBUG")
    yield messages
    logger.remove(handler)
    logger.disable("fieldbev")
