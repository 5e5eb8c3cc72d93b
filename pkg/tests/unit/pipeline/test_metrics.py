import numpy as np
import pytest

from fieldbev.pipeline import COLUMNS, MetricsRow, append_rows, image_scores, mean_row, read_rows, render_rows


def row(step: int, value: float) -> MetricsRow:
    return MetricsRow(step=step, **{name: value for name in COLUMNS[1:]})


def test_render_rows_format():
    text = render_rows([row(3, 1.0 / 3.0)])
    header, line = text.splitlines()
    assert header == ",".join(COLUMNS)
    assert line == "3," + ",".join(["0.333333333333"] * (len(COLUMNS) - 1))


def test_append_writes_the_header_once(tmp_path):
    path = tmp_path / "metrics.csv"
    append_rows(path, [row(0, 0.5)])
    append_rows(path, [row(1, 0.25), row(2, 0.125)])
    assert path.read_text().count("step,") == 1
    assert [r["l_mask"] for r in read_rows(path)] == ["0.5", "0.25", "0.125"]


def test_mean_row_averages_every_column():
    mean = mean_row([row(0, 1.0), row(1, 3.0)], step=7)
    assert mean.step == 7
    assert mean.bev_iou == pytest.approx(2.0)
    assert mean.l_render == pytest.approx(2.0)


def test_mean_of_no_rows_is_zero():
    assert mean_row([], step=0) == row(0, 0.0)


def test_image_scores(rng):
    gt = rng.uniform(size=(12, 12, 3))
    mask = np.zeros((12, 12))
    mask[2:6, 3:9] = 1
    fg, full = image_scores(gt, gt, mask)
    assert (fg, full) == (pytest.approx(1.0), pytest.approx(1.0))
    fg, full = image_scores(np.where(mask[..., None] > 0, gt, 0.0), gt, mask)
    assert fg == pytest.approx(1.0)
    assert full < 1.0
