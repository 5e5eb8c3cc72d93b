import numpy as np
import pytest

from fieldbev.adapters import FieldBevError
from fieldbev.io import (
    format_value, parse_lines, render_manifest, write_manifest, read_manifest,
    parse_floats, parse_ints, format_shape, parse_shape,
)


# --------------------
# Tests for format_value
# --------------------


@pytest.mark.parametrize(
    "value, text",
    [
        pytest.param(True, "on", id="bool-on"),
        pytest.param(False, "off", id="bool-off"),
        pytest.param(3, "3", id="int"),
        pytest.param(np.int64(7), "7", id="numpy-int"),
        pytest.param(0.1, "0.1", id="float"),
        pytest.param(np.float64(2.5), "2.5", id="numpy-float"),
        pytest.param((1, 2.0), "1, 2.0", id="tuple"),
        pytest.param("hybrid", "hybrid", id="text"),
    ],
)
def test_format_value(value, text):
    assert format_value(value) == text


def test_float_text_reads_back_exactly():
    value = 1.0 / 3.0
    assert float(format_value(value)) == value


# --------------------
# Tests for parse_lines
# --------------------


def test_parse_lines_skips_blanks_and_comments():
    text = "# header\n\nseed = 3  # trailing\n  goal=scene \n"
    assert parse_lines(text) == [(3, "seed", "3"), (4, "goal", "scene")]


def test_value_may_contain_equals():
    assert parse_lines("a = b = c") == [(1, "a", "b = c")]


def test_line_without_equals_is_rejected():
    with pytest.raises(FieldBevError) as info:
        parse_lines("seed 3", source="run.cfg")
    err = info.value.first
    assert err.code == "INVALID_CONFIG"
    assert err.path == "run.cfg"
    assert err.message.startswith("run.cfg:1:")


# --------------------
# Tests for manifest files
# --------------------


def test_manifest_file_round_trip(tmp_path):
    path = tmp_path / "sub" / "manifest.txt"
    write_manifest(path, [("format", "fieldbev-scene"), ("scale", 0.25), ("dims", (8, 8, 4))])
    assert path.read_text() == "format = fieldbev-scene\nscale = 0.25\ndims = 8, 8, 4\n"
    assert read_manifest(path) == [("format", "fieldbev-scene"), ("scale", "0.25"), ("dims", "8, 8, 4")]


def test_render_manifest_of_nothing_is_empty():
    assert render_manifest([]) == ""


# --------------------
# Tests for scalar list and shape text
# --------------------


def test_parse_numbers():
    assert parse_floats("1.5, -2, 3e-1") == (1.5, -2.0, 0.3)
    assert parse_ints("8, 8,4,") == (8, 8, 4)


@pytest.mark.parametrize(
    "shape, text",
    [
        pytest.param((), "scalar", id="scalar"),
        pytest.param((5,), "5", id="vector"),
        pytest.param((2, 3, 4), "2x3x4", id="volume"),
    ],
)
def test_shape_text(shape, text):
    assert format_shape(shape) == text
    assert parse_shape(text) == shape
