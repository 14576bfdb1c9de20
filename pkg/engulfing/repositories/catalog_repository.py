"""
Repository of built-in convex functions.
"""
import logging
import math
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from ..helpers.error_handlers import InvalidParameterError
from ..models.function_spec import ConvexBody, FunctionSpec, SmoothHint

logger = logging.getLogger(__name__)


def _exp(u: float) -> float:
    try:
        return math.exp(u)
    except OverflowError:
        return math.inf


class PowerBody(ConvexBody):
    """x ↦ x^k for even k."""

    def __init__(self, exponent: int):
        self.exponent = exponent

    def value(self, x):
        return float(x[0]) ** self.exponent

    def directional(self, x, v):
        return self.exponent * float(x[0]) ** (self.exponent - 1) * float(v[0])

    def describe(self):
        return f"x^{self.exponent}"


class Example21Body(ConvexBody):
    """x² on x < 0, x⁴ on x ≥ 0; C¹ with a curvature jump at 0."""

    def value(self, x):
        u = float(x[0])
        return u * u if u < 0 else u ** 4

    def directional(self, x, v):
        u, w = float(x[0]), float(v[0])
        return 2.0 * u * w if u < 0 else 4.0 * u ** 3 * w

    def describe(self):
        return "piecewise(x<0: x^2, x>=0: x^4)"


class AbsBody(ConvexBody):

    def value(self, x):
        return abs(float(x[0]))

    def directional(self, x, v):
        u, w = float(x[0]), float(v[0])
        if u > 0:
            return w
        if u < 0:
            return -w
        return abs(w)

    def kinks_1d(self):
        return (0.0,)

    def describe(self):
        return "abs(x)"


class ExpBody(ConvexBody):

    def value(self, x):
        return _exp(float(x[0]))

    def directional(self, x, v):
        w = float(v[0])
        return 0.0 if w == 0.0 else _exp(float(x[0])) * w

    def describe(self):
        return "exp(x)"


class ExpSquareBody(ConvexBody):

    def value(self, x):
        u = float(x[0])
        return _exp(u * u)

    def directional(self, x, v):
        u, w = float(x[0]), float(v[0])
        if u == 0.0 or w == 0.0:
            return 0.0
        return 2.0 * u * _exp(u * u) * w

    def describe(self):
        return "exp(x^2)"


class AffineBody(ConvexBody):
    """x ↦ a·x + b."""

    def __init__(self, a: np.ndarray, b: float):
        self.a = a
        self.b = b

    def value(self, x):
        return float(np.dot(self.a, x)) + self.b

    def directional(self, x, v):
        return float(np.dot(self.a, v))

    def describe(self):
        return f"{self.a.tolist()}·x + {self.b}"


class StripBody(ConvexBody):
    """(x, y) ↦ x²; sections are strips S(x, t) × ℝ."""

    def value(self, x):
        return float(x[0]) ** 2

    def directional(self, x, v):
        return 2.0 * float(x[0]) * float(v[0])

    def describe(self):
        return "x1^2"


class QuadraticFormBody(ConvexBody):
    """x ↦ xᵀAx with A symmetric positive semidefinite."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix

    def value(self, x):
        return float(x @ self.matrix @ x)

    def directional(self, x, v):
        return float(2.0 * (self.matrix @ x) @ v)

    def describe(self):
        return f"x^T {self.matrix.tolist()} x"


def _vector_param(value: Any, name: str) -> np.ndarray:
    try:
        vector = np.array(value, dtype=float).reshape(-1)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"Parameter '{name}' must be a real vector", field=name) from e
    if vector.size == 0 or not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"Parameter '{name}' must be a non-empty finite vector", field=name)
    return vector


def _matrix_param(value: Any, name: str) -> np.ndarray:
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"Parameter '{name}' must be a real matrix", field=name) from e
    if matrix.ndim == 1:
        side = int(round(math.sqrt(matrix.size)))
        if side * side != matrix.size:
            raise InvalidParameterError(f"Parameter '{name}' with {matrix.size} entries is not square", field=name)
        matrix = matrix.reshape(side, side)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or not np.all(np.isfinite(matrix)):
        raise InvalidParameterError(f"Parameter '{name}' must be a finite square matrix", field=name)
    if not np.allclose(matrix, matrix.T, atol=1e-12):
        raise InvalidParameterError(f"Parameter '{name}' must be symmetric", field=name)
    smallest = float(np.linalg.eigvalsh(matrix).min())
    if smallest < -1e-12:
        raise InvalidParameterError(
            f"Parameter '{name}' must be positive semidefinite (smallest eigenvalue {smallest})", field=name)
    return matrix


def _build_affine(params: Dict[str, Any]) -> FunctionSpec:
    a = _vector_param(params.get('a', [2.0]), 'a')
    b = float(params.get('b', 1.0))
    if not math.isfinite(b):
        raise InvalidParameterError("Parameter 'b' must be finite", field='b')
    return FunctionSpec(a.size, AffineBody(a, b), SmoothHint.SMOOTH, 'affine', {'a': a.tolist(), 'b': b})


def _build_polyquad(params: Dict[str, Any]) -> FunctionSpec:
    matrix = _matrix_param(params.get('A', [[2.0, 0.5], [0.5, 1.0]]), 'A')
    return FunctionSpec(matrix.shape[0], QuadraticFormBody(matrix), SmoothHint.SMOOTH, 'polyquad',
                        {'A': matrix.tolist()})


_SIMPLE: Dict[str, Tuple[int, Callable[[], ConvexBody], SmoothHint, str]] = {
    'quad': (1, lambda: PowerBody(2), SmoothHint.SMOOTH, "x²"),
    'quartic': (1, lambda: PowerBody(4), SmoothHint.SMOOTH, "x⁴"),
    'ex21': (1, Example21Body, SmoothHint.SMOOTH, "x² for x < 0, x⁴ for x ≥ 0"),
    'abs': (1, AbsBody, SmoothHint.HAS_KINKS, "|x|"),
    'exp': (1, ExpBody, SmoothHint.SMOOTH, "eˣ"),
    'expsq': (1, ExpSquareBody, SmoothHint.SMOOTH, "e^{x²}"),
    'strip2d': (2, StripBody, SmoothHint.SMOOTH, "(x, y) ↦ x²"),
}

_PARAMETRIZED = {
    'affine': (_build_affine, "a·x + b (defaults a=[2], b=1)", ('a', 'b')),
    'polyquad': (_build_polyquad, "xᵀAx, A ⪰ 0 (default [[2, 0.5], [0.5, 1]])", ('A',)),
}

CATALOG_ORDER = ('quad', 'quartic', 'ex21', 'abs', 'exp', 'expsq', 'affine', 'strip2d', 'polyquad')


class CatalogRepository:
    """Repository for the built-in function catalog"""

    def list_tags(self) -> List[str]:
        return list(CATALOG_ORDER)

    def describe(self, tag: str) -> str:
        if tag in _SIMPLE:
            return _SIMPLE[tag][3]
        if tag in _PARAMETRIZED:
            return _PARAMETRIZED[tag][1]
        raise self._unknown(tag)

    def get_by_tag(self, tag: str, **params) -> FunctionSpec:
        """
        Build the catalog function for a tag.

        Raises:
            InvalidParameterError: unknown tag, unexpected or invalid parameters
        """
        if tag in _SIMPLE:
            if params:
                raise InvalidParameterError(f"Function '{tag}' takes no parameters, got {sorted(params)}",
                                            field='params')
            dimension, factory, hint, _ = _SIMPLE[tag]
            spec = FunctionSpec(dimension, factory(), hint, tag)
        elif tag in _PARAMETRIZED:
            builder, _, allowed = _PARAMETRIZED[tag]
            unexpected = sorted(set(params) - set(allowed))
            if unexpected:
                raise InvalidParameterError(f"Unknown parameters for '{tag}': {unexpected}", field='params')
            spec = builder(params)
        else:
            raise self._unknown(tag)
        logger.debug(f"Catalog function built: {spec!r}")
        return spec

    def _unknown(self, tag: str) -> InvalidParameterError:
        return InvalidParameterError(f"Unknown catalog function '{tag}'; expected one of {', '.join(CATALOG_ORDER)}",
                                     field='builtin')
