from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from loguru import logger

from ..diffcore import no_grad
from ..runtime import ordered_map
from ..scene_synth import SyntheticScene, generate_scene
from .config import RunConfig
from .metrics import MetricsRow, image_scores, iou, mean_row
from .model import ForwardPass, forward
from .state import ModelParams, TrainState


def scene_pool(cfg: RunConfig, seeds: Sequence[int]) -> list[SyntheticScene]:
    return ordered_map(lambda seed: generate_scene(cfg.scene_config(seed)), seeds)


def pass_row(step: int, fp: ForwardPass, scene: SyntheticScene, params: ModelParams) -> MetricsRow:
    """Metrics of one forward pass; image scores average over its rendered views."""
    scores = [
        image_scores(r.final.image.values, scene.gt_rgb[r.view], scene.masks2d[r.view])
        for r in fp.renders
    ]
    fg, full = np.mean(scores, axis=0) if scores else (0.0, 0.0)
    return MetricsRow(
        step=step,
        l_render=fp.render.total.item() if fp.render else 0.0,
        l_mse=fp.render.mse.item() if fp.render else 0.0,
        l_ssim=fp.render.ssim.item() if fp.render else 0.0,
        l_l1=fp.render.l1.item() if fp.render else 0.0,
        l_mask=fp.mask.total.item() if fp.mask else 0.0,
        alpha=params.fusion.alpha_value,
        ssim_foreground=float(fg),
        ssim_full=float(full),
        bev_iou=iou(fp.mask_prob.values, scene.mask_bev),
    )


@dataclass(kw_only=True, eq=False)
class EvalResult:
    summary: MetricsRow
    per_scene: list[MetricsRow] = field(default_factory=list)
    mask_probs: list[np.ndarray] = field(default_factory=list)
    attention: list[np.ndarray | None] = field(default_factory=list)


def evaluate(
        state: TrainState,
        cfg: RunConfig,
        scenes: Sequence[SyntheticScene],
        views: Sequence[int] | None = None,
        *,
        render: bool = True,
) -> EvalResult:
    """
    Average metrics over `scenes` with the object-centric loss mask.

    Rendering runs for the metrics only; `render=False` runs the BEV
    inference path alone (IoU only).
    """
    result = EvalResult(summary=mean_row([], state.step))
    with no_grad():
        for scene in scenes:
            chosen = list(views) if views is not None else list(range(scene.n_views))
            fp = forward(cfg, state.params, scene, chosen, "object", render=render)
            result.per_scene.append(pass_row(state.step, fp, scene, state.params))
            result.mask_probs.append(fp.mask_prob.values)
            result.attention.append(fp.attention.values if fp.attention is not None else None)
    result.summary = mean_row(result.per_scene, state.step)
    logger.info(
        "EVAL | step {} | scenes {} | fg ssim {:.4f} | ssim {:.4f} | iou {:.4f}",
        state.step, len(scenes), result.summary.ssim_foreground, result.summary.ssim_full, result.summary.bev_iou,
    )
    return result
