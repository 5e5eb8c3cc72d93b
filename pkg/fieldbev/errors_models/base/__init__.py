from .base import Error

__all__ = ["Error"]
