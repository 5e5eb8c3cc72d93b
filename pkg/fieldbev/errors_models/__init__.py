from .envelopes import FailureEnvelope
from .base import Error

__all__ = ["FailureEnvelope", "Error"]
