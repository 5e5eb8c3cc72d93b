"""Run configuration and its line-based text form.

    # comments and blank lines are ignored
    seed = 3
    steps = 2000
    goal = scene+object
    scene.box_count = 1, 3
    grid.dims = 32, 32, 16
    loss.mse = 10

Top-level keys are `RunConfig` fields; `scene.*`, `grid.*` and `loss.*`
address the nested `SceneConfig`, `VoxelGridSpec` and `LossWeights`.
Values are coerced from the field annotations; unknown keys are rejected.
"""
from __future__ import annotations

import hashlib
import types
import typing
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..adapters import reject
from ..failures import ErrConfig
from ..geometry import VoxelGridSpec
from ..hoa import FUSION_STRATEGIES, OPACITY_SOURCES
from ..io import parse_lines, render_manifest
from ..rendering import FOOTPRINTS, LossWeights
from ..scene_synth import SceneConfig

ABLATIONS = ("hybrid", "gs", "nerf")
GOALS = ("scene", "object", "scene+object")
_TRUE = ("on", "true", "yes", "1")
_FALSE = ("off", "false", "no", "0")


def _invalid(key: str, value, message: str, allowed=(), path: str | None = None) -> Exception:
    return reject(ErrConfig(key=key, value=str(value), allowed=tuple(allowed), path=path, message=message))


@dataclass(kw_only=True, frozen=True)
class RunConfig:
    """Everything a run depends on. Scene seeds derive from `seed`.

    views_per_step = 0 renders every view each step; `views` fixes a view
    subset rendered every step; `view` pins one view and takes precedence.
    hsa = off keeps opacity fusion and the pyramid but drops height slicing.
    lr_decay_every = 0 means one pass over the training pool.
    """

    seed: int = 0
    scene: SceneConfig = field(default_factory=SceneConfig)
    feature_channels: int = 16
    hidden: int = 32
    bev_channels: int = 16
    k: int = 4
    loss: LossWeights = field(default_factory=LossWeights)
    learning_rate: float = 4e-4
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    weight_decay: float = 0.0
    lr_decay: float = 1.0
    lr_decay_every: int = 0
    warmup_steps: int = 200
    steps: int = 2000
    train_scenes: int = 8
    heldout_scenes: int = 4
    ablation: str = "hybrid"
    goal: str = "scene+object"
    hoa: bool = True
    depth_render: bool = True
    footprint: str = "point"
    fusion_strategy: str = "cross_attention"
    opacity_source: str = "fused"
    hsa: bool = True
    multiscale: bool = True
    bev_mask: bool = True
    views_per_step: int = 1
    views: tuple[int, ...] = ()
    view: int | None = None
    theta: float = 0.0
    metrics_every: int = 10

    def __post_init__(self) -> None:
        choices = {
            "ablation": ABLATIONS,
            "goal": GOALS,
            "footprint": FOOTPRINTS,
            "fusion_strategy": FUSION_STRATEGIES,
            "opacity_source": OPACITY_SOURCES,
        }
        for key, allowed in choices.items():
            value = getattr(self, key)
            if value not in allowed:
                raise _invalid(key, value, f"{key} must be one of {', '.join(allowed)}, got {value!r}", allowed)
        if self.warmup_steps > self.steps:
            raise _invalid(
                "warmup_steps", self.warmup_steps,
                f"warm-up ({self.warmup_steps}) must not exceed the step count ({self.steps})",
            )
        for key in ("steps", "warmup_steps", "lr_decay_every", "views_per_step"):
            if getattr(self, key) < 0:
                raise _invalid(key, getattr(self, key), f"{key} must be ≥ 0")
        for key in ("feature_channels", "hidden", "bev_channels", "k", "train_scenes", "metrics_every"):
            if getattr(self, key) < 1:
                raise _invalid(key, getattr(self, key), f"{key} must be ≥ 1")
        if self.heldout_scenes < 0:
            raise _invalid("heldout_scenes", self.heldout_scenes, "heldout_scenes must be ≥ 0")
        if self.view is not None and not 0 <= self.view < self.scene.camera_count:
            raise _invalid("view", self.view, f"view must lie in [0, {self.scene.camera_count}), got {self.view}")
        if any(not 0 <= v < self.scene.camera_count for v in self.views):
            raise _invalid("views", self.views, f"views must lie in [0, {self.scene.camera_count}), got {self.views}")
        if len(set(self.views)) != len(self.views):
            raise _invalid("views", self.views, f"views must be distinct, got {self.views}")
        if self.learning_rate <= 0:
            raise _invalid("learning_rate", self.learning_rate, "learning_rate must be positive")

    @property
    def grid(self) -> VoxelGridSpec:
        return self.scene.grid

    @property
    def decay_period(self) -> int:
        return self.lr_decay_every or self.train_scenes

    @property
    def uses_gs(self) -> bool:
        return self.ablation in ("hybrid", "gs")

    @property
    def uses_nerf(self) -> bool:
        return self.ablation in ("hybrid", "nerf")

    def render_mode(self, step: int) -> str:
        """Loss mask mode at `step`: scene-level during warm-up, object-centric after."""
        if self.goal == "scene+object":
            return "scene" if step < self.warmup_steps else "object"
        return self.goal

    def scene_config(self, seed: int) -> SceneConfig:
        return replace(self.scene, seed=seed)

    def train_seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.train_scenes)]

    def heldout_seeds(self) -> list[int]:
        return [self.seed + 10_000 + i for i in range(self.heldout_scenes)]


_SECTIONS = ("scene", "loss")
# scene seeds come from the run seed
_EXCLUDED = {"scene.seed", "scene.grid"}


def _hints(cls) -> dict[str, object]:
    return typing.get_type_hints(cls)


def _coerce(text: str, hint, key: str, source: str):
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if text.lower() == "none":
            return None
        return _coerce(text, args[0], key, source)
    try:
        if hint is bool:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if hint is int:
            return int(text)
        if hint is float:
            return float(text)
        if hint is str:
            return text
        if origin is tuple:
            args = typing.get_args(hint)
            parts = [p.strip() for p in text.split(",") if p.strip()]
            if len(args) == 2 and args[1] is Ellipsis:
                return tuple(_coerce(p, args[0], key, source) for p in parts)
            if len(parts) != len(args):
                raise ValueError(text)
            return tuple(_coerce(p, a, key, source) for p, a in zip(parts, args))
    except ValueError:
        raise _invalid(key, text, f"{source}: cannot read {key} = {text!r} as {hint}", path=source) from None
    raise _invalid(key, text, f"{source}: unsupported type {hint} for {key}", path=source)


def known_keys() -> dict[str, object]:
    """Dotted key → annotation for every settable field."""
    keys: dict[str, object] = {}
    for name, hint in _hints(RunConfig).items():
        if name not in _SECTIONS:
            keys[name] = hint
    for name, hint in _hints(SceneConfig).items():
        keys[f"scene.{name}"] = hint
    for name, hint in _hints(VoxelGridSpec).items():
        keys[f"grid.{name}"] = hint
    for name, hint in _hints(LossWeights).items():
        keys[f"loss.{name}"] = hint
    for key in _EXCLUDED:
        keys.pop(key, None)
    return keys


def apply_overrides(cfg: RunConfig, values: dict[str, object]) -> RunConfig:
    """New config with dotted-key overrides applied (values already typed)."""
    top = {k: v for k, v in values.items() if "." not in k}
    grouped: dict[str, dict[str, object]] = {}
    for key, value in values.items():
        if "." in key:
            section, name = key.split(".", 1)
            grouped.setdefault(section, {})[name] = value
    grid = replace(cfg.scene.grid, **grouped.get("grid", {}))
    scene = replace(cfg.scene, grid=grid, **grouped.get("scene", {}))
    loss = replace(cfg.loss, **grouped.get("loss", {}))
    return replace(cfg, scene=scene, loss=loss, **top)


def parse_config_text(text: str, source: str = "<config>", base: RunConfig | None = None) -> RunConfig:
    keys = known_keys()
    values: dict[str, object] = {}
    for lineno, key, raw in parse_lines(text, source):
        if key not in keys:
            raise _invalid(key, raw, f"{source}:{lineno}: unknown key {key!r}", path=source)
        values[key] = _coerce(raw, keys[key], key, f"{source}:{lineno}")
    return apply_overrides(base or RunConfig(), values)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise reject(ErrConfig(key="--config", value=str(path), path=str(path), message=f"config file not found: {path}"))
    return parse_config_text(path.read_text(encoding="utf-8"), str(path))


def config_entries(cfg: RunConfig) -> list[tuple[str, object]]:
    """Flat (dotted key, value) pairs in field order; parses back to `cfg`."""
    entries: list[tuple[str, object]] = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "scene":
            for sf in fields(value):
                if sf.name == "seed":
                    continue
                if sf.name == "grid":
                    entries += [(f"grid.{gf.name}", getattr(value.grid, gf.name)) for gf in fields(value.grid)]
                else:
                    entries.append((f"scene.{sf.name}", getattr(value, sf.name)))
        elif f.name == "loss":
            entries += [(f"loss.{lf.name}", getattr(value, lf.name)) for lf in fields(value)]
        else:
            entries.append((f.name, "none" if value is None else value))
    return entries


def render_config(cfg: RunConfig) -> str:
    return render_manifest(config_entries(cfg))


def config_hash(cfg: RunConfig) -> str:
    """sha256 of the canonical text form."""
    return hashlib.sha256(render_config(cfg).encode("utf-8")).hexdigest()
