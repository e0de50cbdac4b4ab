"""
Error Types
Exceptions raised across the optimizer, benchmark and experiment harness
"""

from typing import Any, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

ModelT = TypeVar("ModelT", bound=BaseModel)


class DCPSOError(Exception):
    """Base class for all library errors"""
    pass


class ConfigurationError(DCPSOError):
    """Invalid experiment or benchmark configuration"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class ContractViolation(DCPSOError, ValueError):
    """A caller broke an operation's precondition"""
    pass


class OutputError(DCPSOError, OSError):
    """Metrics could not be written"""

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{message}: {path}")


class ChangeDetectionAudit(DCPSOError):
    """Change detection missed a real environment change (strict audit mode)"""
    pass


class BudgetExhausted(DCPSOError):
    """Evaluation budget of the final environment has been consumed"""
    pass


def coerce_model(model_cls: Type[ModelT], data: Any) -> ModelT:
    """Validate a mapping (or pass through a model) and report failures as ConfigurationError"""

    if isinstance(data, model_cls):
        return data
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"expected a mapping, got {type(data).__name__}")
    try:
        return model_cls.model_validate(dict(data))
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first.get("loc", ())) or None
        raise ConfigurationError(first.get("msg", "invalid value"), key=key) from e
