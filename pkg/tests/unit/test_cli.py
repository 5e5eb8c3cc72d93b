import pytest

from fieldbev import __version__
from fieldbev.cli import build_parser, main
from fieldbev.io import read_manifest
from fieldbev.pipeline import read_rows


def tree(root) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture
def trained(config_file, tmp_path):
    """Provide the output directory of a finished tiny training run."""
    out = tmp_path / "run"
    assert main(["train", "--config", str(config_file), "--out", str(out)]) == 0
    return out


# --------------------
# Tests for argument handling
# --------------------


@pytest.mark.parametrize("argv", [
    pytest.param([], id="no-command"),
    pytest.param(["train", "--bogus"], id="unknown-flag"),
    pytest.param(["train", "--hoa", "maybe"], id="bad-switch"),
    pytest.param(["train", "--view", "left"], id="bad-view"),
    pytest.param(["train", "--views", "0,left"], id="bad-views"),
    pytest.param(["train", "--hsa", "maybe"], id="bad-hsa"),
    pytest.param(["render"], id="missing-checkpoint"),
])
def test_usage_errors_exit_with_one(argv):
    assert main(argv) == 1


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_view_flag_accepts_random_and_indices():
    parser = build_parser()
    assert parser.parse_args(["train", "--view", "random"]).view is None
    assert parser.parse_args(["train", "--view", "2"]).view == 2
    assert not hasattr(parser.parse_args(["train"]), "view")


def test_views_and_hsa_flags():
    args = build_parser().parse_args(["train", "--views", "0,2", "--hsa", "off"])
    assert args.views == (0, 2)
    assert args.hsa is False


def test_out_of_range_views_exit_with_one(config_file, tmp_path):
    assert main(["train", "--config", str(config_file), "--views", "0,7", "--out", str(tmp_path / "run")]) == 1


def test_missing_config_file_exits_with_one(tmp_path):
    assert main(["train", "--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path / "run")]) == 1


def test_invalid_override_exits_with_one(config_file, tmp_path):
    assert main(["train", "--config", str(config_file), "--k", "0", "--out", str(tmp_path / "run")]) == 1


# --------------------
# Tests for synth
# --------------------


def test_synth_is_reproducible(config_file, tmp_path):
    for name in ("a", "b"):
        argv = ["synth", "--config", str(config_file), "--seed", "5", "--count", "2", "--out", str(tmp_path / name)]
        assert main(argv) == 0
    first, second = tree(tmp_path / "a"), tree(tmp_path / "b")
    assert first == second
    assert {"scene_5/manifest.txt", "scene_6/manifest.txt"} <= set(first)


def test_synth_rejects_a_zero_count(tmp_path):
    assert main(["synth", "--count", "0", "--out", str(tmp_path)]) == 1


# --------------------
# Tests for train / render / eval
# --------------------


def test_train_writes_metrics_and_checkpoint(trained):
    assert len(read_rows(trained / "metrics.csv")) == 4
    entries = dict(read_manifest(trained / "checkpoint" / "manifest.txt"))
    assert entries["step"] == "4"


def test_resume_continues_from_the_checkpoint(trained):
    assert main(["train", "--resume", "--steps", "6", "--out", str(trained)]) == 0
    assert [int(r["step"]) for r in read_rows(trained / "metrics.csv")] == [0, 1, 2, 3, 4, 5]


def test_short_run_lowers_the_warm_up(config_file, tmp_path):
    out = tmp_path / "run"
    assert main(["train", "--config", str(config_file), "--steps", "1", "--out", str(out)]) == 0
    assert len(read_rows(out / "metrics.csv")) == 1


def test_render_dumps_every_field(trained, tmp_path):
    out = tmp_path / "render"
    assert main(["render", "--checkpoint", str(trained / "checkpoint"), "--view", "1", "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    for field in ("gs", "nerf", "fused", "gt"):
        assert f"{field}_view1.ppm" in names
        assert f"{field}_depth_view1.pgm" in names


def test_eval_writes_summary_masks_and_attention(trained, tmp_path):
    out = tmp_path / "eval"
    assert main(["eval", "--checkpoint", str(trained / "checkpoint"), "--out", str(out)]) == 0
    assert len(read_rows(out / "metrics.csv")) == 1
    names = {p.name for p in out.iterdir()}
    assert {"bev_mask_10001.pgm", "attention_10001_0.pgm", "attention_10001_1.pgm"} <= names


def test_eval_with_mismatched_shapes_exits_with_one(trained, tmp_path):
    assert main(["eval", "--checkpoint", str(trained / "checkpoint"), "--k", "4", "--out", str(tmp_path / "e")]) == 1


def test_gradcheck_reports_every_case(capsys):
    assert main(["gradcheck"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1].startswith("max")
    assert any(line.startswith("volume.density") for line in lines)
