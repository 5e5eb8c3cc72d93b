from dataclasses import dataclass, field
from typing import final

from ...errors_models import FailureEnvelope, Error


@final
@dataclass(kw_only=True)
class ErrNonFinite(Error):
    """
    A loss or parameter became NaN/inf during training.

    Critical fields:
      - step: optimization step at which it was detected.
      - quantity: which value was non-finite (``L_render``, ``L_mask``...).
      - dump_path: checkpoint directory holding the state at that step.
    """
    code: str = field(default="NON_FINITE", init=False)
    # seed (inherited) carries the scene seed of the offending step
    error_type: str = field(default="numerical_abort")
    step: int | None = None
    quantity: str | None = None
    dump_path: str | None = None


@final
@dataclass(kw_only=True, frozen=True)
class Exit2NumericalAbort(FailureEnvelope[ErrNonFinite]):
    """Numerical abort envelope (exit_code fixed to 2)."""
    exit_code: int = field(default=2, init=False)
