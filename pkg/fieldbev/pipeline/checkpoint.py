"""Checkpoints: a directory with a text manifest and one little-endian float64 blob.

    format = fieldbev-checkpoint
    version = 1
    config_hash = <sha256>
    step = 120
    rng = {"bit_generator": "PCG64", ...}
    param.decoder.projection.weight = 8x16 0
    ...
    adam.m.decoder.projection.weight = 8x16 <byte offset>
    adam.v.decoder.projection.weight = 8x16 <byte offset>
"""
from __future__ import annotations

import difflib
import json
from pathlib import Path

import numpy as np
from loguru import logger

from ..adapters import reject
from ..failures import ErrCheckpoint
from ..io import atomic_write_bytes, atomic_write_text, format_shape, parse_shape, read_manifest, to_blob, write_manifest
from .config import RunConfig, config_hash, parse_config_text, render_config
from .state import TrainState, init_train_state

FORMAT = "fieldbev-checkpoint"
VERSION = 1
MANIFEST = "manifest.txt"
BLOB = "state.f64"
CONFIG = "config.txt"


def _arrays(state: TrainState) -> list[tuple[str, np.ndarray]]:
    named = list(state.named_parameters())
    arrays = [(f"param.{n}", t.values) for n, t in named]
    arrays += [(f"adam.m.{n}", state.moments.first[n]) for n, _ in named]
    arrays += [(f"adam.v.{n}", state.moments.second[n]) for n, _ in named]
    return arrays


def _layout(arrays: list[tuple[str, np.ndarray]]) -> list[tuple[str, str]]:
    offset = 0
    lines = []
    for name, array in arrays:
        lines.append((name, f"{format_shape(array.shape)} {offset}"))
        offset += array.size * 8
    return lines


def save_checkpoint(state: TrainState, cfg: RunConfig, path: str | Path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    arrays = _arrays(state)
    entries: list[tuple[str, object]] = [
        ("format", FORMAT),
        ("version", VERSION),
        ("config_hash", config_hash(cfg)),
        ("step", state.step),
        ("rng", json.dumps(state.rng.bit_generator.state, sort_keys=True)),
    ]
    entries += _layout(arrays)
    atomic_write_bytes(path / BLOB, b"".join(to_blob(a) for _, a in arrays))
    atomic_write_text(path / CONFIG, render_config(cfg))
    write_manifest(path / MANIFEST, entries)
    logger.info("CHECKPOINT | step {} | {}", state.step, path)
    return path


def _mismatch(path: Path, message: str, diff=()) -> Exception:
    return reject(ErrCheckpoint(path=str(path), manifest_diff=tuple(diff), message=message))


def load_checkpoint(path: str | Path, cfg: RunConfig) -> TrainState:
    """Restore a state saved for `cfg`; names and shapes must match exactly."""
    path = Path(path)
    if not (path / MANIFEST).is_file():
        raise _mismatch(path, f"no checkpoint manifest in {path}")
    entries = dict(read_manifest(path / MANIFEST))
    if entries.get("format") != FORMAT or entries.get("version") != str(VERSION):
        raise _mismatch(
            path,
            f"{path}: unsupported checkpoint {entries.get('format')} v{entries.get('version')}",
            [f"-format {FORMAT} v{VERSION}", f"+format {entries.get('format')} v{entries.get('version')}"],
        )
    state = init_train_state(cfg)
    arrays = _arrays(state)
    expected = [f"{n} {v.split()[0]}" for n, v in _layout(arrays)]
    found = [f"{k} {v.split()[0]}" for k, v in entries.items() if k.startswith(("param.", "adam."))]
    if expected != found:
        diff = [
            line for line in difflib.unified_diff(expected, found, "expected", "found", lineterm="", n=0)
            if line[:1] in "+-" and not line.startswith(("+++", "---"))
        ]
        raise _mismatch(path, f"{path}: checkpoint parameters do not match the configuration", diff)
    if entries.get("config_hash") != config_hash(cfg):
        logger.warning("CHECKPOINT | {} was written for a different configuration", path)

    blob = (path / BLOB).read_bytes() if (path / BLOB).is_file() else b""
    total = sum(a.size for _, a in arrays) * 8
    if len(blob) != total:
        raise _mismatch(path, f"{path / BLOB}: expected {total} bytes, found {len(blob)}")
    data = np.frombuffer(blob, dtype="<f8")
    for name, target in arrays:
        shape_text, offset = entries[name].split()
        start = int(offset) // 8
        target[...] = data[start:start + target.size].reshape(parse_shape(shape_text))
    state.step = int(entries["step"])
    state.rng.bit_generator.state = json.loads(entries["rng"])
    return state


def checkpoint_config(path: str | Path) -> RunConfig | None:
    """The configuration a checkpoint was saved with, if it carries one."""
    source = Path(path) / CONFIG
    if not source.is_file():
        return None
    return parse_config_text(source.read_text(encoding="utf-8"), str(source))
