from dataclasses import dataclass, field
from typing import final

from ...errors_models import FailureEnvelope, Error


@final
@dataclass(kw_only=True)
class ErrShape(Error):
    """Operands whose shapes an operation cannot combine.

    Critical fields:
      - shapes: every offending shape, in argument order.
    """

    code: str = field(default="SHAPE_MISMATCH", init=False)
    error_type: str = field(default="shape_mismatch")
    shapes: tuple[tuple[int, ...], ...] = field(default_factory=tuple)


@final
@dataclass(kw_only=True, frozen=True)
class Exit1ShapeMismatch(FailureEnvelope[ErrShape]):
    """Shape mismatch envelope (exit_code fixed to 1)."""

    exit_code: int = field(default=1, init=False)
