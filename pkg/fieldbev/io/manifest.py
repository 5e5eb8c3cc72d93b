"""Line-based ``key = value`` text shared by configs, scene manifests and checkpoints."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..adapters import reject
from ..failures import ErrConfig
from .atomic import atomic_write_text


def format_value(value) -> str:
    """Decimal text that reads back to the identical value (floats via repr)."""
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (tuple, list, np.ndarray)):
        return ", ".join(format_value(v) for v in np.asarray(value).reshape(-1).tolist())
    return str(value)


def parse_lines(text: str, source: str = "<text>") -> list[tuple[int, str, str]]:
    """(line number, key, value) triples; blank lines and ``#`` comments skipped."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise reject(ErrConfig(
                path=source,
                value=raw,
                message=f"{source}:{lineno}: expected 'key = value', got {raw!r}",
            ))
        key, value = (part.strip() for part in line.split("=", 1))
        entries.append((lineno, key, value))
    return entries


def render_manifest(entries: Iterable[tuple[str, object]]) -> str:
    return "".join(f"{key} = {format_value(value)}\n" for key, value in entries)


def write_manifest(path: str | Path, entries: Iterable[tuple[str, object]]) -> None:
    atomic_write_text(path, render_manifest(entries))


def read_manifest(path: str | Path) -> list[tuple[str, str]]:
    path = Path(path)
    return [(k, v) for _, k, v in parse_lines(path.read_text(encoding="utf-8"), str(path))]


def parse_floats(value: str) -> tuple[float, ...]:
    return tuple(float(v) for v in value.split(",") if v.strip())


def parse_ints(value: str) -> tuple[int, ...]:
    return tuple(int(v) for v in value.split(",") if v.strip())


def format_shape(shape: Sequence[int]) -> str:
    return "x".join(str(int(n)) for n in shape) if len(shape) else "scalar"


def parse_shape(text: str) -> tuple[int, ...]:
    return () if text == "scalar" else tuple(int(n) for n in text.split("x"))
