from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..diffcore import DiffTensor

FOOTPRINTS = ("point", "disk")


@dataclass(kw_only=True, eq=False)
class RenderOutput:
    image: DiffTensor  # (H, W, 3)
    depth: DiffTensor  # (H, W), meters along the ray
    # volume renderer: selected points no source view could see
    fallbacks: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape


def background_rows(background, height: int, width: int) -> np.ndarray:
    """Background colour or image as (H·W, 3) rows; None means black."""
    if background is None:
        return np.zeros((height * width, 3))
    bg = np.asarray(background, dtype=np.float64)
    return np.broadcast_to(bg, (height, width, 3)).reshape(-1, 3)
