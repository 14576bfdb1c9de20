"""
Input validation utilities.
"""
import logging
import math
from typing import Any, Tuple

import numpy as np

from .error_handlers import DimensionMismatchError, InvalidParameterError

logger = logging.getLogger(__name__)


def validate_positive_real(value: Any, field_name: str) -> Tuple[bool, str]:
    """
    Validate that value is a finite positive real.

    Args:
        value: Value to validate
        field_name: Field name for error message

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        real = float(value)
    except (ValueError, TypeError):
        return False, f"Field '{field_name}' must be a number"
    if not math.isfinite(real) or real <= 0:
        return False, f"Field '{field_name}' must be a positive finite number"
    return True, ""


def validate_constant(value: Any, field_name: str = "K") -> Tuple[bool, str]:
    """
    Validate an engulfing constant (finite, strictly greater than one).

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        real = float(value)
    except (ValueError, TypeError):
        return False, f"Field '{field_name}' must be a number"
    if not math.isfinite(real) or real <= 1:
        return False, f"Field '{field_name}' must be a finite number greater than 1"
    return True, ""


def require_constant_above_one(value: Any, field_name: str = "K") -> float:
    """Return value as float or raise InvalidParameterError when it is not > 1."""
    is_valid, message = validate_constant(value, field_name)
    if not is_valid:
        raise InvalidParameterError(message, field=field_name)
    return float(value)


def require_positive_height(value: Any, field_name: str = "t") -> float:
    """Return value as float or raise InvalidParameterError when it is not > 0."""
    is_valid, message = validate_positive_real(value, field_name)
    if not is_valid:
        raise InvalidParameterError(message, field=field_name)
    return float(value)


def require_vector(value: Any, dimension: int, what: str = "vector") -> np.ndarray:
    """
    Coerce value to a read-only float vector of the given dimension.

    Scalars are accepted for dimension 1.

    Raises:
        DimensionMismatchError: length differs from dimension
        InvalidParameterError: entries are not finite reals
    """
    try:
        vector = np.array(value, dtype=float).reshape(-1)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"{what} is not a real vector: {e}", field=what) from e
    if vector.shape[0] != dimension:
        raise DimensionMismatchError(dimension, vector.shape[0], what)
    if not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"{what} has non-finite entries", field=what)
    vector.setflags(write=False)
    return vector


def require_unit_vector(value: Any, dimension: int, what: str = "direction") -> np.ndarray:
    """Like require_vector, and additionally ‖value‖ = 1 within 1e-9."""
    vector = require_vector(value, dimension, what)
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > 1e-9:
        raise InvalidParameterError(f"{what} must have unit norm, got {norm}", field=what)
    return vector
