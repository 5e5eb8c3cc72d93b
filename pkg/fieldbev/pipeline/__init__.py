from .config import (
    RunConfig, ABLATIONS, GOALS,
    parse_config_text, load_config, apply_overrides, config_entries, render_config, config_hash, known_keys,
)
from .state import ModelParams, AdamMoments, TrainState, init_train_state
from .optim import adam_step, learning_rate
from .model import ViewRenders, ForwardPass, forward, render_views, bev_branch
from .metrics import MetricsRow, COLUMNS, render_rows, append_rows, read_rows, image_scores, mean_row
from .checkpoint import save_checkpoint, load_checkpoint, checkpoint_config
from .evaluate import EvalResult, evaluate, scene_pool, pass_row
from .train import TrainResult, train, choose_views, METRICS_FILE, CHECKPOINT_DIR
from .gradcheck_suite import GradCase, suite_cases, run_gradcheck_suite, TOLERANCE, DRAWS

__all__ = [
    "RunConfig", "ABLATIONS", "GOALS",
    "parse_config_text", "load_config", "apply_overrides", "config_entries", "render_config",
    "config_hash", "known_keys",
    "ModelParams", "AdamMoments", "TrainState", "init_train_state",
    "adam_step", "learning_rate",
    "ViewRenders", "ForwardPass", "forward", "render_views", "bev_branch",
    "MetricsRow", "COLUMNS", "render_rows", "append_rows", "read_rows", "image_scores", "mean_row",
    "save_checkpoint", "load_checkpoint", "checkpoint_config",
    "EvalResult", "evaluate", "scene_pool", "pass_row",
    "TrainResult", "train", "choose_views", "METRICS_FILE", "CHECKPOINT_DIR",
    "GradCase", "suite_cases", "run_gradcheck_suite", "TOLERANCE", "DRAWS",
]
