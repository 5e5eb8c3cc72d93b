from dataclasses import dataclass, field
from typing import TypeVar, Generic, Mapping

from .base import Error


E_co = TypeVar("E_co", bound=Error, covariant=True)


@dataclass(kw_only=True, frozen=True)
class FailureEnvelope(Generic[E_co]):
    """Exit-code carrying container for failure DTOs.

    The CLI turns an envelope into a process exit code; library callers
    inspect ``detail`` directly.

    Args:
        exit_code (int): Process exit code the failure maps to.
        detail (list[E_co], optional): Failures, in the order found.
        hints (Mapping[str, str] | None, optional): Extra key/value context
            printed after the failures (e.g. the dump directory).

    Examples:
        >>> env = FailureEnvelope[Error](
        ...     exit_code=1,
        ...     detail=[Error(code="X", error_type="x", message="m")],
        ... )
    """
    exit_code: int
    detail: list[E_co] = field(default_factory=list)
    hints: Mapping[str, str] | None = None
