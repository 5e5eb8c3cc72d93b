from dataclasses import replace

import pytest

from fieldbev.adapters import FieldBevError
from fieldbev.pipeline import (
    ABLATIONS, RunConfig, apply_overrides, config_hash, known_keys, load_config, parse_config_text, render_config,
)

TEXT = """\
# tiny run
seed = 3
steps = 20
warmup_steps = 5      # scene-level loss first
scene.box_count = 1, 3
grid.dims = 8, 8, 4
grid.voxel_size = 2
loss.mse = 5
hoa = off
view = none
"""


# --------------------
# Tests for the text form
# --------------------


def test_parse_reads_every_section():
    cfg = parse_config_text(TEXT, "run.cfg")
    assert (cfg.seed, cfg.steps, cfg.warmup_steps) == (3, 20, 5)
    assert cfg.scene.box_count == (1, 3)
    assert cfg.grid.dims == (8, 8, 4)
    assert cfg.grid.voxel_size == 2.0
    assert cfg.loss.mse == 5.0
    assert cfg.loss.ssim == 1.0
    assert cfg.hoa is False
    assert cfg.view is None


@pytest.mark.parametrize("text, value", [
    pytest.param("hoa = yes", True, id="yes"),
    pytest.param("hoa = On", True, id="on"),
    pytest.param("hoa = 0", False, id="zero"),
    pytest.param("hoa = false", False, id="false"),
])
def test_booleans(text, value):
    assert parse_config_text(text).hoa is value


def test_pinned_view():
    assert parse_config_text("view = 2").view == 2


def test_fixed_views_and_height_slicing():
    cfg = parse_config_text("views = 0, 2\nhsa = off\n")
    assert cfg.views == (0, 2)
    assert cfg.hsa is False
    assert parse_config_text("views =").views == ()


def test_unknown_key_names_the_line():
    with pytest.raises(FieldBevError) as info:
        parse_config_text("seed = 1\nbogus = 2\n", "run.cfg")
    first = info.value.first
    assert first.key == "bogus"
    assert first.path == "run.cfg"
    assert "run.cfg:2:" in first.message
    assert info.value.exit_code == 1


@pytest.mark.parametrize("text, key", [
    pytest.param("steps = many", "steps", id="int"),
    pytest.param("hoa = maybe", "hoa", id="bool"),
    pytest.param("grid.dims = 8, 8", "grid.dims", id="tuple-length"),
    pytest.param("learning_rate = fast", "learning_rate", id="float"),
])
def test_unreadable_values(text, key):
    with pytest.raises(FieldBevError) as info:
        parse_config_text(text)
    assert info.value.first.key == key


def test_render_parses_back_to_the_same_hash(run_config):
    again = parse_config_text(render_config(run_config))
    assert config_hash(again) == config_hash(run_config)
    assert render_config(again) == render_config(run_config)


def test_hash_tracks_every_setting(run_config):
    assert config_hash(run_config) != config_hash(replace(run_config, theta=0.5))
    assert config_hash(run_config) == config_hash(replace(run_config))


def test_known_keys_skip_derived_fields():
    keys = known_keys()
    assert "scene.seed" not in keys
    assert "scene.grid" not in keys
    assert {"grid.dims", "loss.bce", "scene.noise_level", "warmup_steps"} <= set(keys)


def test_load_config(config_file, run_config):
    assert config_hash(load_config(config_file)) == config_hash(run_config)


def test_load_missing_file(tmp_path):
    with pytest.raises(FieldBevError) as info:
        load_config(tmp_path / "absent.cfg")
    assert info.value.first.key == "--config"


def test_overrides_reach_nested_sections(run_config):
    cfg = apply_overrides(run_config, {"grid.voxel_size": 1.0, "scene.camera_count": 4, "loss.dice": 2.0, "k": 4})
    assert cfg.grid.voxel_size == 1.0
    assert cfg.grid.dims == run_config.grid.dims
    assert cfg.scene.camera_count == 4
    assert cfg.loss.dice == 2.0
    assert cfg.k == 4


# --------------------
# Tests for validation
# --------------------


def test_warmup_longer_than_training_is_rejected():
    with pytest.raises(FieldBevError) as info:
        RunConfig(warmup_steps=10, steps=5)
    assert info.value.first.key == "warmup_steps"


def test_unknown_ablation_is_rejected():
    with pytest.raises(FieldBevError) as info:
        RunConfig(ablation="both")
    assert info.value.first.allowed == ABLATIONS


@pytest.mark.parametrize("overrides, key", [
    pytest.param({"k": 0}, "k", id="k"),
    pytest.param({"views_per_step": -1}, "views_per_step", id="views"),
    pytest.param({"heldout_scenes": -1}, "heldout_scenes", id="heldout"),
    pytest.param({"learning_rate": 0.0}, "learning_rate", id="lr"),
    pytest.param({"view": 3}, "view", id="view-out-of-range"),
    pytest.param({"views": (0, 3)}, "views", id="views-out-of-range"),
    pytest.param({"views": (1, 1)}, "views", id="views-repeated"),
    pytest.param({"footprint": "square"}, "footprint", id="footprint"),
])
def test_invalid_settings(make_run_config, overrides, key):
    with pytest.raises(FieldBevError) as info:
        make_run_config(**overrides)
    assert info.value.first.key == key


# --------------------
# Tests for derived settings
# --------------------


@pytest.mark.parametrize("goal, expected", [
    pytest.param("scene+object", ["scene", "scene", "object", "object"], id="warm-up"),
    pytest.param("scene", ["scene"] * 4, id="scene"),
    pytest.param("object", ["object"] * 4, id="object"),
])
def test_render_mode(make_run_config, goal, expected):
    cfg = make_run_config(goal=goal)
    assert [cfg.render_mode(step) for step in range(4)] == expected


def test_scene_seeds(run_config):
    assert run_config.train_seeds() == [1, 2]
    assert run_config.heldout_seeds() == [10_001]
    assert run_config.scene_config(7).seed == 7


def test_decay_period_defaults_to_one_pass(make_run_config):
    assert make_run_config().decay_period == 2
    assert make_run_config(lr_decay_every=5).decay_period == 5


def test_field_switches(make_run_config):
    assert (make_run_config(ablation="gs").uses_gs, make_run_config(ablation="gs").uses_nerf) == (True, False)
    assert (make_run_config(ablation="nerf").uses_gs, make_run_config(ablation="nerf").uses_nerf) == (False, True)
