import importlib

import numpy as np
import pytest

from fieldbev.adapters import FieldBevError
from fieldbev.pipeline import (
    CHECKPOINT_DIR, COLUMNS, METRICS_FILE, choose_views, init_train_state, load_checkpoint, read_rows, train,
)

train_module = importlib.import_module("fieldbev.pipeline.train")


def snapshot(state) -> dict[str, np.ndarray]:
    return {name: t.values.copy() for name, t in state.named_parameters()}


# --------------------
# Tests for choose_views
# --------------------


def test_pinned_view_wins(make_run_config, rng):
    assert choose_views(make_run_config(view=2), rng, 3) == [2]


def test_zero_views_per_step_renders_every_view(make_run_config, rng):
    assert sorted(choose_views(make_run_config(views_per_step=0), rng, 3)) == [0, 1, 2]


def test_drawn_views_are_distinct(make_run_config, rng):
    views = choose_views(make_run_config(views_per_step=2), rng, 3)
    assert len(set(views)) == 2
    assert all(0 <= v < 3 for v in views)


def test_views_per_step_is_capped_by_the_camera_count(make_run_config, rng):
    assert len(choose_views(make_run_config(views_per_step=9), rng, 3)) == 3


def test_fixed_views_are_rendered_every_time(make_run_config, rng):
    cfg = make_run_config(views=(0, 2))
    assert [choose_views(cfg, rng, 3) for _ in range(3)] == [[0, 2]] * 3


def test_pinned_view_beats_fixed_views(make_run_config, rng):
    assert choose_views(make_run_config(views=(0, 2), view=1), rng, 3) == [1]


# --------------------
# Tests for train
# --------------------


def test_zero_steps_returns_the_initial_state(make_run_config):
    cfg = make_run_config(warmup_steps=0, steps=0)
    result = train(cfg)
    assert result.state.step == 0
    assert result.rows == []
    initial = snapshot(init_train_state(cfg))
    assert all(np.array_equal(initial[n], t.values) for n, t in result.state.named_parameters())


def test_training_moves_parameters_and_counts_steps(run_config):
    result = train(run_config)
    assert result.state.step == 4
    assert [row.step for row in result.rows] == [0, 1, 2, 3]
    initial = snapshot(init_train_state(run_config))
    assert not np.array_equal(initial["decoder.projection.weight"], result.state.params.decoder.projection.weight.values)


def test_training_is_deterministic(run_config):
    a, b = train(run_config), train(run_config)
    first, second = snapshot(a.state), snapshot(b.state)
    assert all(np.array_equal(first[n], second[n]) for n in first)
    assert a.rows == b.rows


def test_gaussian_only_run_never_touches_nerf_heads(make_run_config):
    state = train(make_run_config(ablation="gs")).state
    nerf = [n for n in state.moments.first if n.startswith(("decoder.density.", "decoder.view_weight."))]
    assert nerf
    assert all(not state.moments.first[n].any() and not state.moments.second[n].any() for n in nerf)


def test_disabled_hoa_leaves_its_weights_unchanged(make_run_config):
    cfg = make_run_config(hoa=False)
    initial = snapshot(init_train_state(cfg))
    state = train(cfg).state
    hoa = [n for n in initial if n.startswith("hoa.")]
    assert hoa
    after = snapshot(state)
    assert all(np.array_equal(initial[n], after[n]) for n in hoa)
    assert not np.array_equal(initial["bev.mask_head.weight"], after["bev.mask_head.weight"])


def test_resume_matches_an_uninterrupted_run(make_run_config, tmp_path):
    full = train(make_run_config(steps=4), out_dir=tmp_path / "full")
    split = tmp_path / "split"
    head = train(make_run_config(steps=2), out_dir=split)
    cfg = make_run_config(steps=4)
    tail = train(cfg, state=load_checkpoint(split / CHECKPOINT_DIR, cfg), out_dir=split)
    first, second = snapshot(full.state), snapshot(tail.state)
    assert all(np.array_equal(first[n], second[n]) for n in first)
    assert head.rows + tail.rows == full.rows
    assert [int(r["step"]) for r in read_rows(split / METRICS_FILE)] == [0, 1, 2, 3]
    assert (split / METRICS_FILE).read_bytes() == (tmp_path / "full" / METRICS_FILE).read_bytes()


def test_output_directory_holds_metrics_and_checkpoint(run_config, tmp_path):
    result = train(run_config, out_dir=tmp_path)
    rows = read_rows(tmp_path / METRICS_FILE)
    assert tuple(rows[0]) == COLUMNS
    assert len(rows) == len(result.rows) == 4
    assert float(rows[2]["alpha"]) == pytest.approx(result.rows[2].alpha)
    assert (tmp_path / CHECKPOINT_DIR / "manifest.txt").is_file()


def test_metrics_every_thins_the_rows(make_run_config):
    assert [r.step for r in train(make_run_config(metrics_every=3)).rows] == [0, 3]


def test_loss_mask_switches_after_warm_up(run_config, monkeypatch):
    modes = []
    real = train_module.forward

    def spy(cfg, params, scene, views, mode, **kwargs):
        modes.append(mode)
        return real(cfg, params, scene, views, mode, **kwargs)

    monkeypatch.setattr(train_module, "forward", spy)
    train(run_config)
    assert modes == ["scene", "scene", "object", "object"]


def test_non_finite_loss_aborts_with_a_dump(run_config, tmp_path):
    state = init_train_state(run_config)
    state.params.fusion.theta.values[...] = np.nan
    with pytest.raises(FieldBevError) as info:
        train(run_config, state=state, out_dir=tmp_path)
    first = info.value.first
    assert info.value.exit_code == 2
    assert (first.step, first.quantity, first.seed) == (0, "L_render", 1)
    assert (tmp_path / "abort" / "manifest.txt").is_file()


def test_identical_runs_write_identical_metrics(run_config, tmp_path):
    train(run_config, out_dir=tmp_path / "a")
    train(run_config, out_dir=tmp_path / "b")
    assert (tmp_path / "a" / METRICS_FILE).read_bytes() == (tmp_path / "b" / METRICS_FILE).read_bytes()


def test_fixed_views_reach_every_step(make_run_config, monkeypatch):
    seen = []
    real = train_module.forward

    def spy(cfg, params, scene, views, mode, **kwargs):
        seen.append(list(views))
        return real(cfg, params, scene, views, mode, **kwargs)

    monkeypatch.setattr(train_module, "forward", spy)
    train(make_run_config(views=(2, 0)))
    assert seen == [[2, 0]] * 4


def test_switching_off_height_slicing_changes_training(make_run_config):
    sliced = train(make_run_config()).rows
    pooled = train(make_run_config(hsa=False)).rows
    assert sliced[0].l_render == pooled[0].l_render
    assert [r.l_mask for r in sliced] != [r.l_mask for r in pooled]
