"""PPM (P6, 8-bit) and PGM (P5, 16-bit) writers on top of Pillow."""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .atomic import atomic_write_bytes


def _encode(image: Image.Image) -> bytes:
    buf = io.BytesIO()
    image.save(buf, format="PPM")
    return buf.getvalue()


def write_ppm(path: str | Path, rgb: np.ndarray) -> None:
    """(H, W, 3) values in [0, 1] → P6 with samples round(255·v)."""
    samples = np.clip(np.round(np.asarray(rgb) * 255.0), 0, 255).astype(np.uint8)
    atomic_write_bytes(path, _encode(Image.fromarray(samples)))


def write_pgm16(path: str | Path, values: np.ndarray, scale: float) -> None:
    """(H, W) values → P5 maxval 65535, samples round(scale·v) saturated to [0, 65535].

    Pillow stores 16-bit PGM samples big-endian, per the format.
    """
    samples = np.clip(np.round(np.asarray(values) * scale), 0, 65535).astype(np.uint16)
    atomic_write_bytes(path, _encode(Image.fromarray(samples)))


def write_depth_pgm(path: str | Path, depth_m: np.ndarray) -> None:
    """Depth in meters stored as millimetres."""
    write_pgm16(path, depth_m, scale=1000.0)


def write_heatmap_pgm(path: str | Path, values01: np.ndarray) -> None:
    """Probabilities / attention values in [0, 1] scaled by 65535."""
    write_pgm16(path, values01, scale=65535.0)


def read_image(path: str | Path) -> np.ndarray:
    with Image.open(path) as im:
        return np.array(im)
