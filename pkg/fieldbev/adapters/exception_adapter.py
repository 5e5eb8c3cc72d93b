from typing import TypeVar

from ..errors_models import Error, FailureEnvelope
from ..failures import (
    ErrShape, Exit1ShapeMismatch,
    ErrDivisibility, Exit1NotDivisible,
    ErrConfig, Exit1InvalidConfig,
    ErrCheckpoint, Exit1CheckpointMismatch,
    ErrSampling, Exit1SamplingExhausted,
    ErrNonFinite, Exit2NumericalAbort,
)

E_co = TypeVar("E_co", bound=Error, covariant=True)

_ENVELOPES: dict[type[Error], type[FailureEnvelope]] = {
    ErrShape: Exit1ShapeMismatch,
    ErrDivisibility: Exit1NotDivisible,
    ErrConfig: Exit1InvalidConfig,
    ErrCheckpoint: Exit1CheckpointMismatch,
    ErrSampling: Exit1SamplingExhausted,
    ErrNonFinite: Exit2NumericalAbort,
}


class FieldBevError(Exception):
    """Exception raised by every operation that rejects its inputs.

    Carries the envelope so callers (and the CLI) can read the exit code
    and the structured failures instead of parsing the message.
    """

    def __init__(self, envelope: FailureEnvelope) -> None:
        self.envelope = envelope
        messages = "; ".join(err.message for err in envelope.detail)
        super().__init__(messages or f"failure (exit {envelope.exit_code})")

    @property
    def exit_code(self) -> int:
        return self.envelope.exit_code

    @property
    def first(self) -> Error:
        return self.envelope.detail[0]


def failure_exception(
        *,
        error: FailureEnvelope,
) -> FieldBevError:
    """
    Build the package exception around an envelope.

    - `detail` is kept as-is; `str(exc)` joins the failure messages
    - `hints` stay on the envelope for the CLI to print

    Usage:
        raise failure_exception(error=Exit1ShapeMismatch(detail=[ErrShape(...)]))
    """
    return FieldBevError(error)


def reject(*errors: Error, hints: dict[str, str] | None = None) -> FieldBevError:
    """Wrap failures of one kind in their envelope and build the exception."""
    envelope_cls = _ENVELOPES[type(errors[0])]
    return failure_exception(error=envelope_cls(detail=list(errors), hints=hints))
