from dataclasses import dataclass, field
from typing import final

from ...errors_models import FailureEnvelope, Error


@final
@dataclass(kw_only=True)
class ErrSampling(Error):
    """
    Rejection sampling gave up before placing every box.

    Critical fields:
      - attempts: number of draws made for the box that failed.
      - placed: boxes already placed when sampling stopped.
    """
    code: str = field(default="SAMPLING_EXHAUSTED", init=False)
    error_type: str = field(default="sampling_exhausted")
    attempts: int = 0
    placed: int = 0


@final
@dataclass(kw_only=True, frozen=True)
class Exit1SamplingExhausted(FailureEnvelope[ErrSampling]):
    """Sampling exhaustion envelope (exit_code fixed to 1)."""
    exit_code: int = field(default=1, init=False)
