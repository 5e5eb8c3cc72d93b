from __future__ import annotations
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .mixins import ToDictMixin


def _now_iso() -> str:
    """
    Return the current moment in ISO 8601 format with UTC timezone.

    Example: '2026-10-09T12:34:56.789012+00:00'
    """
    return datetime.now(timezone.utc).isoformat()


@dataclass(kw_only=True)
class ErrorFields:
    """
    Data-only fields shared by every failure the package reports.

    Fields:
      - code (str): Machine-readable code (e.g. 'SHAPE_MISMATCH').
      - error_type (str): Failure family (e.g. 'shape_mismatch').
      - message (str): Human-readable message.
      - timestamp (str): ISO-8601 creation time in UTC (autofill).
      - op (str | None): Operation that refused its inputs.
      - seed (int | None): Scene or run seed involved, for reproduction.
      - path (str | None): File involved (config, checkpoint, dump).
      - traceback (str | None): Stack trace, only when debugging.
    """
    code: str
    error_type: str
    message: str
    timestamp: str = field(default_factory=_now_iso)
    op: str | None = None
    seed: int | None = None
    path: str | None = None
    traceback: str | None = None


@dataclass
class Error(ErrorFields, ToDictMixin):
    """
    Concrete failure DTO: `ErrorFields` plus shallow `to_dict()`.

    Intended to be the `detail` payload of a `FailureEnvelope`.
    """
    pass
