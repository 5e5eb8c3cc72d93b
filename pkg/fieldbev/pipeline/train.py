from __future__ import annotations

import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from loguru import logger

from ..adapters import reject
from ..diffcore import backward
from ..failures import ErrNonFinite
from ..scene_synth import SyntheticScene
from .checkpoint import save_checkpoint
from .config import RunConfig
from .evaluate import pass_row, scene_pool
from .metrics import MetricsRow, append_rows
from .model import ForwardPass, forward
from .optim import adam_step, learning_rate
from .state import TrainState, init_train_state

METRICS_FILE = "metrics.csv"
CHECKPOINT_DIR = "checkpoint"


@dataclass(kw_only=True, eq=False)
class TrainResult:
    state: TrainState
    rows: list[MetricsRow] = field(default_factory=list)


def choose_views(cfg: RunConfig, rng: np.random.Generator, n_views: int) -> list[int]:
    """The pinned view, the fixed subset, or distinct uniformly drawn views (all when views_per_step = 0)."""
    if cfg.view is not None:
        return [cfg.view]
    if cfg.views:
        return list(cfg.views)
    count = n_views if cfg.views_per_step == 0 else min(cfg.views_per_step, n_views)
    return [int(v) for v in rng.choice(n_views, size=count, replace=False)]


def _first_non_finite(fp: ForwardPass) -> str | None:
    parts = [("L_render", fp.render.total if fp.render else None), ("L_mask", fp.mask.total if fp.mask else None)]
    for name, value in parts:
        if value is not None and not np.isfinite(value.item()):
            return name
    return None if np.isfinite(fp.total.item()) else "L_total"


def _abort(state: TrainState, cfg: RunConfig, scene: SyntheticScene, quantity: str, out_dir: Path | None) -> Exception:
    dump = (out_dir / "abort") if out_dir else Path(tempfile.mkdtemp(prefix="fieldbev-abort-"))
    save_checkpoint(state, cfg, dump)
    logger.error("TRAIN | step {} | {} is not finite | scene seed {} | state in {}", state.step, quantity, scene.seed, dump)
    return reject(ErrNonFinite(
        op="train",
        step=state.step,
        seed=scene.seed,
        quantity=quantity,
        dump_path=str(dump),
        path=str(dump),
        message=f"non-finite {quantity} at step {state.step} (scene seed {scene.seed}); state dumped to {dump}",
    ))


def train(
        cfg: RunConfig,
        *,
        out_dir: str | Path | None = None,
        state: TrainState | None = None,
        scenes: Sequence[SyntheticScene] | None = None,
) -> TrainResult:
    """
    Run steps state.step … cfg.steps − 1 and return the final state.

    Each step cycles the training pool, draws the views to render, picks
    the loss mask (scene-level during warm-up), backpropagates the total
    loss and applies one optimizer update. A metrics row is taken every
    `metrics_every` steps before the update; with `out_dir` the rows are
    appended to metrics.csv (truncated on a fresh start) and the final
    state is checkpointed.
    """
    state = state if state is not None else init_train_state(cfg)
    scenes = list(scenes) if scenes is not None else scene_pool(cfg, cfg.train_seeds())
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        if state.step == 0:
            (out / METRICS_FILE).write_text("", encoding="utf-8")
    result = TrainResult(state=state)
    logger.info("TRAIN | steps {} → {} | {} scenes | ablation {} | goal {}", state.step, cfg.steps, len(scenes), cfg.ablation, cfg.goal)

    for step in range(state.step, cfg.steps):
        scene = scenes[step % len(scenes)]
        views = choose_views(cfg, state.rng, scene.n_views)
        state.params.zero_grad()
        fp = forward(cfg, state.params, scene, views, cfg.render_mode(step))
        bad = _first_non_finite(fp)
        if bad is not None:
            raise _abort(state, cfg, scene, bad, out)
        if step % cfg.metrics_every == 0:
            row = pass_row(step, fp, scene, state.params)
            result.rows.append(row)
            if out is not None:
                append_rows(out / METRICS_FILE, [row])
            logger.info(
                "TRAIN | step {} | render {:.6f} | mask {:.6f} | alpha {:.4f} | iou {:.4f}",
                step, row.l_render, row.l_mask, row.alpha, row.bev_iou,
            )
        backward(fp.total)
        adam_step(state, cfg, learning_rate(cfg, step))
        state.step = step + 1

    if out is not None:
        save_checkpoint(state, cfg, out / CHECKPOINT_DIR)
    return result
