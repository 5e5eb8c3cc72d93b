"""Command line: synth, train, render, eval, gradcheck.

Exit codes: 0 success, 1 validation failure (bad flag, config, checkpoint,
shape), 2 numerical abort during training.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from loguru import logger

from . import __version__
from .adapters import FieldBevError, reject
from .failures import ErrConfig
from .io import write_depth_pgm, write_heatmap_pgm, write_ppm
from .pipeline import (
    CHECKPOINT_DIR, METRICS_FILE, TOLERANCE, RunConfig,
    append_rows, apply_overrides, checkpoint_config, evaluate, forward, load_checkpoint, load_config,
    run_gradcheck_suite, scene_pool, train,
)
from .scene_synth import generate_scene, write_scene_dir
from .diffcore import no_grad

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {message}"


class FieldBevArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1, like every other validation failure."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError(f"expected on or off, got {text!r}")
    return text == "on"


def _view(text: str) -> int | None:
    if text == "random":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected random or a view index, got {text!r}") from None


def _view_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated view indices, got {text!r}") from None


def _run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key = value run configuration")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--ablation", choices=("hybrid", "gs", "nerf"))
    parser.add_argument("--goal", choices=("scene", "object", "scene+object"))
    parser.add_argument("--hoa", type=_on_off, metavar="{on,off}")
    parser.add_argument("--hsa", type=_on_off, metavar="{on,off}", help="height slicing inside HOA")
    parser.add_argument("--depth-render", dest="depth_render", type=_on_off, metavar="{on,off}")
    parser.add_argument("--k", type=int)
    parser.add_argument("--view", type=_view, default=argparse.SUPPRESS, metavar="{random,INDEX}")
    parser.add_argument("--views", type=_view_list, metavar="I,J,...", help="fixed views rendered every step")


def build_parser() -> FieldBevArgumentParser:
    parser = FieldBevArgumentParser(prog="fieldbev", description="Hybrid radiance-field supervision for BEV features.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True, parser_class=FieldBevArgumentParser)

    synth = sub.add_parser("synth", help="write procedural scenes")
    synth.add_argument("--config", type=Path)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--count", type=int, default=1)
    synth.add_argument("--out", type=Path, default=Path("scenes"))

    run = sub.add_parser("train", help="run the training loop")
    _run_flags(run)
    run.add_argument("--out", type=Path, default=Path("run"))
    run.add_argument("--resume", action="store_true", help="continue from OUT/checkpoint")

    render = sub.add_parser("render", help="dump renders of one scene view from a checkpoint")
    _run_flags(render)
    render.add_argument("--checkpoint", type=Path, required=True)
    render.add_argument("--scene-seed", dest="scene_seed", type=int)
    render.add_argument("--out", type=Path, default=Path("render"))

    ev = sub.add_parser("eval", help="held-out metrics, BEV masks and attention maps")
    _run_flags(ev)
    ev.add_argument("--checkpoint", type=Path, required=True)
    ev.add_argument("--out", type=Path, default=Path("eval"))

    grad = sub.add_parser("gradcheck", help="central-difference check of every differentiable operation")
    grad.add_argument("--seed", type=int, default=0)
    return parser


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)
    logger.enable("fieldbev")


def resolve_config(args: argparse.Namespace, fallback: RunConfig | None = None) -> RunConfig:
    """Config file (or `fallback`), then the command-line overrides."""
    if getattr(args, "config", None) is not None:
        cfg = load_config(args.config)
    else:
        cfg = fallback or RunConfig()
    values = {
        key: getattr(args, key)
        for key in ("seed", "steps", "ablation", "goal", "hoa", "hsa", "depth_render", "k", "views")
        if getattr(args, key, None) is not None
    }
    if hasattr(args, "view"):
        values["view"] = args.view
    steps = values.get("steps")
    if steps is not None and steps < cfg.warmup_steps:
        logger.warning("CONFIG | --steps {} is shorter than the warm-up; warm-up lowered to {}", steps, steps)
        values["warmup_steps"] = steps
    return apply_overrides(cfg, values)


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    if args.count < 1:
        raise reject(ErrConfig(key="--count", value=str(args.count), message="--count must be ≥ 1"))
    for i in range(args.count):
        scene = generate_scene(cfg.scene_config(args.seed + i))
        root = write_scene_dir(scene, args.out)
        logger.info("SYNTH | seed {} | {} boxes | {}", scene.seed, len(scene.boxes), root)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    state = None
    fallback = None
    if args.resume:
        fallback = checkpoint_config(args.out / CHECKPOINT_DIR)
    cfg = resolve_config(args, fallback)
    if args.resume:
        state = load_checkpoint(args.out / CHECKPOINT_DIR, cfg)
    result = train(cfg, out_dir=args.out, state=state)
    logger.info("TRAIN | done | step {} | {}", result.state.step, args.out / METRICS_FILE)
    return 0


def _checkpoint_run(args: argparse.Namespace):
    cfg = resolve_config(args, checkpoint_config(args.checkpoint))
    return cfg, load_checkpoint(args.checkpoint, cfg)


def cmd_render(args: argparse.Namespace) -> int:
    cfg, state = _checkpoint_run(args)
    view = cfg.view if cfg.view is not None else 0
    seed = args.scene_seed if args.scene_seed is not None else cfg.train_seeds()[0]
    scene = generate_scene(cfg.scene_config(seed))
    with no_grad():
        fp = forward(cfg, state.params, scene, [view], "object")
    args.out.mkdir(parents=True, exist_ok=True)
    renders = fp.renders[0]
    for name in ("gs", "nerf", "fused"):
        out = getattr(renders, name)
        if out is None:
            continue
        write_ppm(args.out / f"{name}_view{view}.ppm", out.image.values)
        write_depth_pgm(args.out / f"{name}_depth_view{view}.pgm", out.depth.values)
    write_ppm(args.out / f"gt_view{view}.ppm", scene.gt_rgb[view])
    write_depth_pgm(args.out / f"gt_depth_view{view}.pgm", scene.gt_depth[view])
    logger.info("RENDER | scene {} | view {} | {}", seed, view, args.out)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg, state = _checkpoint_run(args)
    scenes = scene_pool(cfg, cfg.heldout_seeds())
    views = [cfg.view] if cfg.view is not None else (list(cfg.views) or None)
    result = evaluate(state, cfg, scenes, views)
    args.out.mkdir(parents=True, exist_ok=True)
    metrics = args.out / METRICS_FILE
    metrics.unlink(missing_ok=True)
    append_rows(metrics, [result.summary])
    for scene, prob, maps in zip(scenes, result.mask_probs, result.attention):
        write_heatmap_pgm(args.out / f"bev_mask_{scene.seed}.pgm", prob)
        if maps is not None:
            for g, attention in enumerate(maps):
                write_heatmap_pgm(args.out / f"attention_{scene.seed}_{g}.pgm", attention)
    return 0


def cmd_gradcheck(args: argparse.Namespace) -> int:
    results = run_gradcheck_suite(args.seed)
    width = max(len(name) for name, _ in results)
    for name, error in results:
        print(f"{name:<{width}}  {error:.3e}")
    worst = max(error for _, error in results)
    print(f"{'max':<{width}}  {worst:.3e}")
    return 0 if worst < TOLERANCE else 1


COMMANDS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "render": cmd_render,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except FieldBevError as exc:
        logger.error("{} | {}", exc.first.code, exc)
        for error in exc.envelope.detail:
            logger.debug("detail | {}", error.to_dict())
        for key, hint in (exc.envelope.hints or {}).items():
            logger.error("hint | {}: {}", key, hint)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
