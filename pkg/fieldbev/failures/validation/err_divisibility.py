from dataclasses import dataclass, field
from typing import final

from ...errors_models import FailureEnvelope, Error


@final
@dataclass(kw_only=True)
class ErrDivisibility(Error):
    """An extent that must split evenly does not.

    Critical fields:
      - dividend_name / dividend: the extent being split (e.g. ``Z``).
      - divisor_name / divisor: the group count (e.g. ``k``).
    """

    code: str = field(default="NOT_DIVISIBLE", init=False)
    error_type: str = field(default="not_divisible")
    dividend_name: str
    dividend: int
    divisor_name: str
    divisor: int


@final
@dataclass(kw_only=True, frozen=True)
class Exit1NotDivisible(FailureEnvelope[ErrDivisibility]):
    """Divisibility envelope (exit_code fixed to 1)."""

    exit_code: int = field(default=1, init=False)
