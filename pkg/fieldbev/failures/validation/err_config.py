from dataclasses import dataclass, field
from typing import final, Sequence

from ...errors_models import FailureEnvelope, Error


@final
@dataclass(kw_only=True)
class ErrConfig(Error):
    """
    Invalid run or scene configuration.

    Critical fields:
      - key: dotted config key (``scene.box_count``) or CLI flag.
      - value: the raw text that was refused.
      - allowed: accepted values, when the set is finite.
    """
    code: str = field(default="INVALID_CONFIG", init=False)
    error_type: str = field(default="invalid_config")
    key: str | None = None
    value: str | None = None
    allowed: Sequence[str] = field(default_factory=tuple)


@final
@dataclass(kw_only=True, frozen=True)
class Exit1InvalidConfig(FailureEnvelope[ErrConfig]):
    """Invalid configuration envelope (exit_code fixed to 1)."""
    exit_code: int = field(default=1, init=False)
