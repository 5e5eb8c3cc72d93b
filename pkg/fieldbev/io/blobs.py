from __future__ import annotations

from pathlib import Path

import numpy as np

from .atomic import atomic_write_bytes

_LE_F64 = np.dtype("<f8")


def to_blob(array: np.ndarray) -> bytes:
    return np.ascontiguousarray(array, dtype=_LE_F64).tobytes()


def write_blob(path: str | Path, array: np.ndarray) -> None:
    """Raw little-endian float64, C order, no header."""
    atomic_write_bytes(path, to_blob(array))


def read_blob(path: str | Path, shape: tuple[int, ...]) -> np.ndarray:
    data = np.frombuffer(Path(path).read_bytes(), dtype=_LE_F64)
    return data.reshape(shape).astype(np.float64)
