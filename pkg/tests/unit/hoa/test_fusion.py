import numpy as np
import pytest

from fieldbev.adapters import FieldBevError
from fieldbev.diffcore import DiffTensor, gradcheck
from fieldbev.hoa import HOAParams, cross_attention, opacity_fusion, query_source, select_opacity
from fieldbev.rendering import FusionParams


def logit(p: float) -> float:
    return float(np.log(p / (1.0 - p)))


@pytest.fixture
def params(rng) -> HOAParams:
    """Provide HOA weights for Z = 4 with two height groups."""
    return HOAParams.init(rng, height=4, groups=2)


@pytest.fixture
def volumes(rng) -> tuple[DiffTensor, DiffTensor]:
    """Provide Gaussian and NeRF opacity volumes over a 3×2×4 grid."""
    return DiffTensor(rng.uniform(size=(3, 2, 4))), DiffTensor(rng.uniform(size=(3, 2, 4)))


# --------------------
# Tests for query_source
# --------------------


@pytest.mark.parametrize("alpha, expected", [
    pytest.param(0.4, "nerf", id="nerf-heavier"),
    pytest.param(0.7, "gs", id="gs-heavier"),
    pytest.param(0.5, "nerf", id="tie"),
])
def test_query_source(alpha, expected):
    assert query_source(FusionParams.init(logit(alpha))) == expected


# --------------------
# Tests for opacity_fusion
# --------------------


def test_cross_attention_shape_range_and_rows(volumes, params):
    o_gs, o_nerf = volumes
    fused = opacity_fusion(o_gs, o_nerf, FusionParams.init(), params)
    assert fused.volume.shape == (3, 2, 4)
    assert np.all((fused.volume.values > 0.0) & (fused.volume.values < 1.0))
    assert fused.attention.shape == (6, 6)
    assert np.allclose(fused.attention.sum(axis=1), 1.0)
    assert fused.query_source == "nerf"


@pytest.mark.parametrize("alpha, query", [pytest.param(0.3, 1, id="nerf-queries"), pytest.param(0.8, 0, id="gs-queries")])
def test_heavier_field_supplies_the_query(volumes, params, alpha, query):
    fused = opacity_fusion(*volumes, FusionParams.init(logit(alpha)), params)
    expected, _ = cross_attention(volumes[query], volumes[1 - query], params)
    assert np.array_equal(fused.volume.values, expected.values)


def test_weighted_mean(volumes, params):
    o_gs, o_nerf = volumes
    fused = opacity_fusion(o_gs, o_nerf, FusionParams.init(logit(0.25)), params, strategy="weighted_mean")
    assert np.allclose(fused.volume.values, 0.25 * o_gs.values + 0.75 * o_nerf.values)
    assert fused.query_source is None
    assert fused.attention is None


def test_concat_conv_keeps_the_volume_shape(volumes, params):
    fused = opacity_fusion(*volumes, FusionParams.init(), params, strategy="concat_conv")
    assert fused.volume.shape == (3, 2, 4)


def test_unknown_strategy_is_rejected(volumes, params):
    with pytest.raises(FieldBevError) as info:
        opacity_fusion(*volumes, FusionParams.init(), params, strategy="vote")
    assert info.value.first.key == "hoa.fusion_strategy"


def test_mismatched_volumes_are_rejected(params):
    with pytest.raises(FieldBevError) as info:
        opacity_fusion(DiffTensor(np.zeros((3, 2, 4))), DiffTensor(np.zeros((2, 3, 4))), FusionParams.init(), params)
    assert info.value.first.op == "opacity_fusion"


def test_cross_attention_gradient_matches_central_differences(volumes, params):
    _, context = volumes
    assert gradcheck(lambda q: cross_attention(q, context, params)[0].sum(), np.full((3, 2, 4), 0.3)) < 1e-5


# --------------------
# Tests for select_opacity
# --------------------


@pytest.mark.parametrize("source, index", [pytest.param("gs", 0, id="gs"), pytest.param("nerf", 1, id="nerf")])
def test_single_sources_pass_through(volumes, params, source, index):
    assert select_opacity(*volumes, FusionParams.init(), params, source=source).volume is volumes[index]


def test_unknown_source_is_rejected(volumes, params):
    with pytest.raises(FieldBevError) as info:
        select_opacity(*volumes, FusionParams.init(), params, source="both")
    assert info.value.first.allowed == ("fused", "gs", "nerf")
