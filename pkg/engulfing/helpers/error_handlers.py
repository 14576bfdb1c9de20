"""
Error handling utilities and custom exceptions.
"""
import logging
from functools import wraps
from typing import Any, Callable, Dict, Optional, Sequence

import click
from pydantic import ValidationError as PydanticValidationError

from .logging_config import log_error_with_context

logger = logging.getLogger(__name__)


class EngulfingError(Exception):
    """Base exception for the toolkit."""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        user_message: Optional[str] = None
    ):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.user_message = user_message or message


class DimensionMismatchError(EngulfingError):
    """Vector length does not match the function dimension."""

    def __init__(self, expected: int, actual: int, what: str = "vector"):
        super().__init__(
            f"{what} has dimension {actual}, expected {expected}",
            {'expected': expected, 'actual': actual, 'what': what}
        )
        self.expected = expected
        self.actual = actual


class KinkPointError(EngulfingError):
    """The subdifferential is not a singleton at the requested point."""

    def __init__(self, point: Sequence[float], left: Optional[float] = None,
                 right: Optional[float] = None, axis: Optional[int] = None):
        point = [float(v) for v in point]
        where = f" along axis {axis}" if axis is not None else ""
        super().__init__(
            f"kink at {point}{where}: one-sided slopes {left} and {right} differ",
            {'point': point, 'left_slope': left, 'right_slope': right, 'axis': axis},
            "The function is not differentiable at this point"
        )
        self.point = point
        self.left = left
        self.right = right


class InvalidParameterError(EngulfingError):
    """A parameter is outside its admissible range."""

    def __init__(self, message: str, field: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, {**(details or {}), 'field': field})
        self.field = field


class ExpressionSyntaxError(EngulfingError):
    """Malformed function expression."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(
            f"{message} at offset {offset}",
            {'offset': offset, 'text': text},
            f"Syntax error at offset {offset}: {message}"
        )
        self.offset = offset


class UnsupportedConstructError(EngulfingError):
    """Expression uses a construct outside the function language."""

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(message, {'offset': offset})
        self.offset = offset


class ExpressionDimensionError(EngulfingError):
    """Expression refers to a variable outside the declared dimension."""

    def __init__(self, message: str, offset: Optional[int] = None, dimension: Optional[int] = None):
        super().__init__(message, {'offset': offset, 'dimension': dimension})
        self.offset = offset
        self.dimension = dimension


class ConvexityViolationError(EngulfingError):
    """Midpoint convexity failed at a sampled triple."""

    def __init__(self, witness: Any):
        super().__init__(
            f"midpoint convexity violated: {witness}",
            {'witness': witness},
            "The function is not convex"
        )
        self.witness = witness


class EvaluationError(EngulfingError):
    """The function produced a non-finite value."""


class ReportError(EngulfingError):
    """A report cannot be produced from the given input."""


def handle_service_error(func: Callable) -> Callable:
    """
    Decorator for service layer operations.

    Domain errors are re-raised untouched; anything else is logged with
    context and wrapped into EngulfingError.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except EngulfingError:
            raise
        except Exception as e:
            log_error_with_context(logger, e, {'operation': func.__name__})
            raise EngulfingError(f"Service error in {func.__name__}: {str(e)}") from e
    return wrapper


def handle_validation_error(func: Callable) -> Callable:
    """
    Decorator translating ValueError and pydantic failures into InvalidParameterError.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except EngulfingError:
            raise
        except PydanticValidationError as e:
            fields = [".".join(str(p) for p in err['loc']) for err in e.errors()]
            raise InvalidParameterError(f"Validation error: {e}", field=",".join(fields) or None) from e
        except ValueError as e:
            raise InvalidParameterError(f"Validation error: {str(e)}") from e
    return wrapper


def cli_error_handler(func: Callable) -> Callable:
    """
    Decorator for click commands: domain errors become usage failures (exit code 2).
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except EngulfingError as e:
            logger.error(f"User Error: {e.message}")
            raise click.UsageError(e.user_message) from e
    return wrapper
