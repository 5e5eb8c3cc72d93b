from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable

import numpy as np

from ..diffcore import no_grad
from ..hoa import bev_iou
from ..rendering import ssim


@dataclass(kw_only=True, frozen=True)
class MetricsRow:
    step: int
    l_render: float
    l_mse: float
    l_ssim: float
    l_l1: float
    l_mask: float
    alpha: float
    ssim_foreground: float
    ssim_full: float
    bev_iou: float


COLUMNS = tuple(f.name for f in fields(MetricsRow))


def _cell(value) -> str:
    return str(value) if isinstance(value, (int, np.integer)) else format(float(value), ".12g")


def render_rows(rows: Iterable[MetricsRow], header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow([_cell(v) for v in astuple(row)])
    return buf.getvalue()


def append_rows(path: str | Path, rows: Iterable[MetricsRow]) -> None:
    """Append to a metrics CSV, writing the header when the file is new."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", encoding="utf-8", newline="") as fh:
        fh.write(render_rows(rows, header=fresh))


def read_rows(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def image_scores(image: np.ndarray, gt: np.ndarray, mask: np.ndarray) -> tuple[float, float]:
    """(foreground SSIM of the masked pair, full-image SSIM)."""
    m = np.asarray(mask, dtype=np.float64)[..., None]
    with no_grad():
        fg = ssim(image * m, gt * m).item()
        full = ssim(image, gt).item()
    return fg, full


def mean_row(rows: list[MetricsRow], step: int) -> MetricsRow:
    values = np.mean([astuple(r)[1:] for r in rows], axis=0) if rows else np.zeros(len(COLUMNS) - 1)
    return MetricsRow(step=step, **dict(zip(COLUMNS[1:], (float(v) for v in values))))


def iou(prob: np.ndarray, gt: np.ndarray) -> float:
    return bev_iou(prob, gt)
