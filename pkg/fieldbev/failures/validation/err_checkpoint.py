from dataclasses import dataclass, field
from typing import final

from ...errors_models import FailureEnvelope, Error


@final
@dataclass(kw_only=True)
class ErrCheckpoint(Error):
    """
    Checkpoint that does not match the running configuration.

    Critical fields:
      - manifest_diff: ``-expected`` / ``+found`` lines, one per mismatch.
    """
    code: str = field(default="CHECKPOINT_MISMATCH", init=False)
    error_type: str = field(default="checkpoint_mismatch")
    manifest_diff: tuple[str, ...] = field(default_factory=tuple)


@final
@dataclass(kw_only=True, frozen=True)
class Exit1CheckpointMismatch(FailureEnvelope[ErrCheckpoint]):
    """Checkpoint mismatch envelope (exit_code fixed to 1)."""
    exit_code: int = field(default=1, init=False)
