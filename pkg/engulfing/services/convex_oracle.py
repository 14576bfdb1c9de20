"""
Convex function oracle: evaluation, gradients, one-sided slopes, line
restriction, affine normalization and the midpoint-convexity check.
"""
import logging
import math
from typing import Callable, List, Optional

import numpy as np

from ..helpers.error_handlers import (ConvexityViolationError, EvaluationError, InvalidParameterError,
                                      KinkPointError)
from ..helpers.validators import require_vector
from ..models.config_models import SamplerConfig
from ..models.function_spec import ConvexBody, FunctionSpec, SlopeInterval, SmoothHint
from ..models.results import ConvexityCheckResult
from ..repositories.catalog_repository import CatalogRepository
from .funcdef import ExpressionBody, has_nonsmooth_nodes, parse
from .sampling import draw_point, task_rng

logger = logging.getLogger(__name__)

_KINK_TOLERANCE = 1e-9
_CONVEXITY_ABS_TOL = 1e-9
_CONVEXITY_REL_TOL = 1e-9


class LineRestrictionBody(ConvexBody):
    """s ↦ φ((1 - s)x + sz)."""

    def __init__(self, base: FunctionSpec, start: np.ndarray, end: np.ndarray):
        self.base = base
        self.start = start
        self.end = end
        self.step = end - start
        self.analytic = base.body.analytic

    def point(self, s: float) -> np.ndarray:
        return (1.0 - s) * self.start + s * self.end

    def value(self, x):
        return self.base.body.value(self.point(float(x[0])))

    def directional(self, x, v):
        return self.base.body.directional(self.point(float(x[0])), float(v[0]) * self.step)

    def central_gradient(self, x):
        if self.analytic:
            return None
        return np.array([float(self.base.body.central_gradient(self.point(float(x[0]))) @ self.step)])

    def describe(self):
        return f"{self.base.body.describe()} on [{self.start.tolist()}, {self.end.tolist()}]"


class NormalizedBody(ConvexBody):
    """x ↦ φ(x) - φ(0) - ∇φ(0)·x."""

    def __init__(self, base: ConvexBody, offset: float, slope: np.ndarray):
        self.base = base
        self.offset = offset
        self.slope = slope
        self.analytic = base.analytic

    def value(self, x):
        return self.base.value(x) - self.offset - float(np.dot(self.slope, x))

    def directional(self, x, v):
        return self.base.directional(x, v) - float(np.dot(self.slope, v))

    def central_gradient(self, x):
        gradient = self.base.central_gradient(x)
        return None if gradient is None else gradient - self.slope

    def kinks_1d(self):
        return self.base.kinks_1d()

    def describe(self):
        return f"normalized({self.base.describe()})"


class AffinePerturbedBody(ConvexBody):
    """x ↦ φ(x) + a·x + b."""

    def __init__(self, base: ConvexBody, a: np.ndarray, b: float):
        self.base = base
        self.a = a
        self.b = b
        self.analytic = base.analytic

    def value(self, x):
        return self.base.value(x) + float(np.dot(self.a, x)) + self.b

    def directional(self, x, v):
        return self.base.directional(x, v) + float(np.dot(self.a, v))

    def central_gradient(self, x):
        gradient = self.base.central_gradient(x)
        return None if gradient is None else gradient + self.a

    def kinks_1d(self):
        return self.base.kinks_1d()

    def describe(self):
        return f"{self.base.describe()} + {self.a.tolist()}·x + {self.b}"


class CallableBody(ConvexBody):
    """
    Python callable with finite-difference derivatives.

    Central differences (step 1e-6·(1+|x|)) for gradients, forward
    differences for one-sided directional derivatives.
    """

    analytic = False

    def __init__(self, fn: Callable[[np.ndarray], float], name: str = 'callable'):
        self.fn = fn
        self.name = name

    def value(self, x):
        return float(self.fn(np.asarray(x, dtype=float)))

    def directional(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        h = 1e-6 * (1.0 + float(np.max(np.abs(x))))
        return (self.value(x + h * v) - self.value(x)) / h

    def central_gradient(self, x):
        x = np.asarray(x, dtype=float)
        gradient = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            h = 1e-6 * (1.0 + abs(float(x[i])))
            e = np.zeros(x.shape[0])
            e[i] = h
            gradient[i] = (self.value(x + e) - self.value(x - e)) / (2.0 * h)
        return gradient

    def describe(self):
        return self.name


def evaluate(f: FunctionSpec, x) -> float:
    """
    φ(x).

    Raises:
        DimensionMismatchError: len(x) differs from f.dimension
        EvaluationError: φ(x) is not finite
    """
    point = require_vector(x, f.dimension, "x")
    value = f.body.value(point)
    if not math.isfinite(value):
        raise EvaluationError(f"{f.label} is not finite at {point.tolist()}: {value}",
                              {'point': point.tolist(), 'value': value})
    return value


def one_sided_derivative(f: FunctionSpec, x, direction) -> float:
    """φ'(x; v) by the analytic rules of the body (forward differences for callables)."""
    point = require_vector(x, f.dimension, "x")
    v = require_vector(direction, f.dimension, "direction")
    return float(f.body.directional(point, v))


def gradient_at(f: FunctionSpec, point: np.ndarray) -> np.ndarray:
    """Gradient at an already validated point."""
    fallback = f.body.central_gradient(point)
    if fallback is not None:
        return np.asarray(fallback, dtype=float)
    n = f.dimension
    gradient = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        right = float(f.body.directional(point, e))
        left = -float(f.body.directional(point, -e))
        if abs(right - left) > _KINK_TOLERANCE * (1.0 + abs(left) + abs(right)):
            raise KinkPointError(point.tolist(), left, right, axis=i if n > 1 else None)
        gradient[i] = right
    return gradient


def gradient(f: FunctionSpec, x) -> np.ndarray:
    """
    ∇φ(x).

    Raises:
        KinkPointError: one-sided partial derivatives differ at x
    """
    return gradient_at(f, require_vector(x, f.dimension, "x"))


def subdifferential_interval_1d(f: FunctionSpec, x) -> SlopeInterval:
    """[d⁻, d⁺] of a one-dimensional function."""
    if f.dimension != 1:
        raise InvalidParameterError(f"subdifferential interval needs dimension 1, got {f.dimension}",
                                    field='dimension')
    point = require_vector(x, 1, "x")
    upper = float(f.body.directional(point, np.array([1.0])))
    lower = -float(f.body.directional(point, np.array([-1.0])))
    if lower > upper:
        lower, upper = upper, lower
    return SlopeInterval(lower, upper)


def subgradients(f: FunctionSpec, x) -> List[np.ndarray]:
    """
    Extreme subgradients at x: the gradient at smooth points, both ends of
    [d⁻, d⁺] at a 1D kink.

    Raises:
        KinkPointError: x is a kink in dimension > 1
    """
    point = require_vector(x, f.dimension, "x")
    if f.dimension == 1 and f.body.analytic:
        interval = subdifferential_interval_1d(f, point)
        return [np.array([s]) for s in interval.extremes()]
    return [gradient_at(f, point)]


def restrict_to_line(f: FunctionSpec, x, z) -> FunctionSpec:
    """ψ(s) = φ((1 - s)x + sz), a one-dimensional convex function."""
    start = require_vector(x, f.dimension, "x")
    end = require_vector(z, f.dimension, "z")
    if np.array_equal(start, end):
        raise InvalidParameterError("restrict_to_line needs distinct points x and z", field='z')
    hint = SmoothHint.SMOOTH if f.smooth_hint == SmoothHint.SMOOTH else SmoothHint.UNKNOWN
    return FunctionSpec(1, LineRestrictionBody(f, start, end), hint, f"{f.label}|line")


def normalize_at_origin(f: FunctionSpec) -> FunctionSpec:
    """
    ψ(x) = φ(x) - φ(0) - ∇φ(0)·x, so ψ(0) = 0, ∇ψ(0) = 0 and ψ ≥ 0.

    Raises:
        KinkPointError: φ is not differentiable at 0
    """
    origin = np.zeros(f.dimension)
    slope = gradient_at(f, origin)
    offset = float(f.body.value(origin))
    if offset == 0.0 and not np.any(slope):
        return f
    label = f.label if f.label.startswith('normalized(') else f"normalized({f.label})"
    return FunctionSpec(f.dimension, NormalizedBody(f.body, offset, slope), f.smooth_hint, label, f.params)


def add_affine(f: FunctionSpec, a, b: float = 0.0) -> FunctionSpec:
    """ψ(x) = φ(x) + a·x + b."""
    slope = require_vector(a, f.dimension, "a")
    if not math.isfinite(b):
        raise InvalidParameterError("affine offset b must be finite", field='b')
    return FunctionSpec(f.dimension, AffinePerturbedBody(f.body, slope, float(b)), f.smooth_hint,
                        f"{f.label}+affine", f.params)


def function_from_callable(fn: Callable[[np.ndarray], float], dimension: int,
                           smooth_hint: SmoothHint = SmoothHint.UNKNOWN, label: str = 'callable') -> FunctionSpec:
    """Wrap a Python callable; derivatives fall back to finite differences."""
    logger.warning(f"Function '{label}' uses finite-difference derivatives")
    return FunctionSpec(dimension, CallableBody(fn, label), smooth_hint, label)


def catalog_function(tag: str, **params) -> FunctionSpec:
    return CatalogRepository().get_by_tag(tag, **params)


def _midpoint_excess(f: FunctionSpec, x: np.ndarray, y: np.ndarray) -> Optional[float]:
    fx = f.body.value(x)
    fy = f.body.value(y)
    fm = f.body.value(0.5 * (x + y))
    if not (math.isfinite(fx) and math.isfinite(fy) and math.isfinite(fm)):
        return None
    excess = fm - 0.5 * (fx + fy)
    tolerance = _CONVEXITY_ABS_TOL + _CONVEXITY_REL_TOL * max(abs(fx), abs(fy), abs(fm))
    return excess if excess > tolerance else None


def _trial_pairs(f: FunctionSpec, sampler: SamplerConfig):
    n = f.dimension
    for scale in (1.0, 0.5, 2.0, sampler.box):
        yield -scale * np.ones(n), scale * np.ones(n)
        for i in range(n if n > 1 else 0):
            e = np.zeros(n)
            e[i] = scale
            yield -e, e
    rng = task_rng(sampler.seed, 0xC0)
    for _ in range(sampler.convexity_triples):
        yield (draw_point(rng, n, sampler.box, sampler.inner_scale),
               draw_point(rng, n, sampler.box, sampler.inner_scale))


def check_convexity(f: FunctionSpec, sampler: Optional[SamplerConfig] = None) -> ConvexityCheckResult:
    """
    Sampled midpoint-convexity check φ((x+y)/2) <= (φ(x)+φ(y))/2 + tolerance
    with tolerance 1e-9 absolute plus 1e-9 relative.
    """
    sampler = sampler or SamplerConfig()
    checked = 0
    for x, y in _trial_pairs(f, sampler):
        checked += 1
        excess = _midpoint_excess(f, x, y)
        if excess is not None:
            logger.info(f"Convexity check failed for {f.label} at x={x.tolist()}, y={y.tolist()}")
            return ConvexityCheckResult(passed=False, pairs_checked=checked, witness_x=x.tolist(),
                                        witness_y=y.tolist(), midpoint_excess=excess)
    logger.debug(f"Convexity check passed for {f.label} after {checked} pairs")
    return ConvexityCheckResult(passed=True, pairs_checked=checked)


def parsed_function(text: str, dimension: int, sampler: Optional[SamplerConfig] = None) -> FunctionSpec:
    """
    Parse an expression and admit it only after the convexity check passes.

    Raises:
        ExpressionSyntaxError, ExpressionDimensionError, UnsupportedConstructError: parse failures
        ConvexityViolationError: the check found a midpoint violation
    """
    tree = parse(text, dimension)
    body = ExpressionBody(tree, text)
    if not has_nonsmooth_nodes(tree):
        hint = SmoothHint.SMOOTH
    elif dimension == 1:
        hint = SmoothHint.HAS_KINKS if body.kinks_1d() else SmoothHint.SMOOTH
    else:
        hint = SmoothHint.UNKNOWN
    f = FunctionSpec(dimension, body, hint, text)
    outcome = check_convexity(f, sampler)
    if not outcome.passed:
        raise ConvexityViolationError({'x': outcome.witness_x, 'y': outcome.witness_y,
                                       'midpoint_excess': outcome.midpoint_excess})
    return f
