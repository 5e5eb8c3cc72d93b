from .exception_adapter import FieldBevError, failure_exception, reject

__all__ = ["FieldBevError", "failure_exception", "reject"]
