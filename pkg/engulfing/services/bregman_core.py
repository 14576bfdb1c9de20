"""
Bregman gaps, the monotone gap and the characterization residuals.

For (x, p), (y, q) in the subdifferential graph the monotone gap splits as
M = (p - q)·(x - y) = D(y; x, p) + D(x; y, q), so the two-sided bound
(K+1)/K · D(y; x, p) <= M <= (K+1) · D(y; x, p) holds exactly when
1/K <= D(x; y, q) / D(y; x, p) <= K.
"""
import logging
import math
from typing import Tuple

import numpy as np

from ..helpers.error_handlers import InvalidParameterError
from ..helpers.validators import require_constant_above_one, require_vector
from ..models.function_spec import FunctionSpec, SubgradientPair
from ..models.results import BregmanGap, CharacterizationResidual, InterpolationResidual
from .convex_oracle import gradient_at, subgradients

logger = logging.getLogger(__name__)

# Gaps below this fraction of the evaluation scale are numerically zero.
NULL_GAP_TOLERANCE = 1e-12


def gap_value(f: FunctionSpec, x: np.ndarray, p: np.ndarray, y: np.ndarray) -> float:
    """D(y; x, p) = φ(y) - φ(x) - p·(y - x) on validated vectors."""
    return f.body.value(y) - f.body.value(x) - float(np.dot(p, y - x))


def gap_with_scale(f: FunctionSpec, x: np.ndarray, p: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    """Gap together with |φ(x)| + |φ(y)| + |p·(y - x)|, the size of the cancelled terms."""
    fx = f.body.value(x)
    fy = f.body.value(y)
    linear = float(np.dot(p, y - x))
    return fy - fx - linear, abs(fx) + abs(fy) + abs(linear)


def is_null_gap(gap: float, scale: float) -> bool:
    return gap <= NULL_GAP_TOLERANCE * scale


def _pair(f: FunctionSpec, pair: SubgradientPair, what: str) -> Tuple[np.ndarray, np.ndarray]:
    return (require_vector(pair.point, f.dimension, f"{what}.point"),
            require_vector(pair.slope, f.dimension, f"{what}.slope"))


def bregman_gap(f: FunctionSpec, base: SubgradientPair, y) -> BregmanGap:
    """D(y; x, p) for base = (x, p)."""
    x, p = _pair(f, base, "base")
    target = require_vector(y, f.dimension, "y")
    return BregmanGap(value=gap_value(f, x, p, target), base=x.tolist(), slope=p.tolist(), target=target.tolist())


def monotone_gap(f: FunctionSpec, a: SubgradientPair, b: SubgradientPair) -> float:
    """(p - q)·(x - y) for a = (x, p), b = (y, q)."""
    x, p = _pair(f, a, "a")
    y, q = _pair(f, b, "b")
    return float(np.dot(p - q, x - y))


def characterization_residual(f: FunctionSpec, a: SubgradientPair, b: SubgradientPair,
                              K: float) -> CharacterizationResidual:
    """
    Slacks (M - (K+1)/K·D, (K+1)·D - M) with D = D(y; x, p) and M the monotone gap.

    Raises:
        InvalidParameterError: K <= 1
    """
    K = require_constant_above_one(K)
    x, p = _pair(f, a, "a")
    y, _ = _pair(f, b, "b")
    gap = gap_value(f, x, p, y)
    monotone = monotone_gap(f, a, b)
    return CharacterizationResidual(
        K=K,
        lower_slack=monotone - (K + 1.0) / K * gap,
        upper_slack=(K + 1.0) * gap - monotone,
        bregman_gap=gap,
        monotone_gap=monotone,
    )


def worst_characterization_residual(f: FunctionSpec, x, y, K: float) -> CharacterizationResidual:
    """Residual with the smallest slack over the extreme subgradients at x and y."""
    K = require_constant_above_one(K)
    worst = None
    for p in subgradients(f, x):
        for q in subgradients(f, y):
            residual = characterization_residual(f, SubgradientPair(x, p), SubgradientPair(y, q), K)
            if worst is None or residual.worst_slack < worst.worst_slack:
                worst = residual
    return worst


def interpolation_residual(f: FunctionSpec, a: SubgradientPair, b: SubgradientPair,
                           K: float) -> InterpolationResidual:
    """
    Slacks of (p + Kq)/(K+1)·(x - y) <= φ(x) - φ(y) <= (q + Kp)/(K+1)·(x - y);
    non-negative exactly when the characterization holds at constant K.
    """
    K = require_constant_above_one(K)
    x, p = _pair(f, a, "a")
    y, q = _pair(f, b, "b")
    rise = f.body.value(x) - f.body.value(y)
    step = x - y
    low = float(np.dot((p + K * q) / (K + 1.0), step))
    high = float(np.dot((q + K * p) / (K + 1.0), step))
    return InterpolationResidual(K=K, left_slack=rise - low, right_slack=high - rise)


def ratio_from_gaps(numerator: float, numerator_scale: float, denominator: float, denominator_scale: float) -> float:
    """
    numerator / denominator with the null-gap policy: both null gives 1,
    a null denominator gives +inf, a null numerator gives 0.
    """
    null_numerator = is_null_gap(numerator, numerator_scale)
    null_denominator = is_null_gap(denominator, denominator_scale)
    if null_numerator and null_denominator:
        return 1.0
    if null_denominator:
        return math.inf
    if null_numerator:
        return 0.0
    return numerator / denominator


def symmetry_gaps(f: FunctionSpec, x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float, float]:
    """(D(x; y, ∇φ(y)), scale, D(y; x, ∇φ(x)), scale) on validated vectors."""
    gx = gradient_at(f, x)
    gy = gradient_at(f, y)
    numerator, numerator_scale = gap_with_scale(f, y, gy, x)
    denominator, denominator_scale = gap_with_scale(f, x, gx, y)
    return numerator, numerator_scale, denominator, denominator_scale


def symmetry_ratio(f: FunctionSpec, x, y) -> float:
    """
    D(x; y, ∇φ(y)) / D(y; x, ∇φ(x)) in [0, +inf].

    Raises:
        InvalidParameterError: x equals y
        KinkPointError: φ is not differentiable at x or y
    """
    a = require_vector(x, f.dimension, "x")
    b = require_vector(y, f.dimension, "y")
    if np.array_equal(a, b):
        raise InvalidParameterError("symmetry ratio needs distinct points", field='y')
    return ratio_from_gaps(*symmetry_gaps(f, a, b))


def pairwise_constant(f: FunctionSpec, x, y) -> float:
    """Smallest K >= 1 for which the characterization holds at the pair: max(r, 1/r, 1)."""
    ratio = symmetry_ratio(f, x, y)
    if ratio == 0.0 or math.isinf(ratio):
        return math.inf
    return max(ratio, 1.0 / ratio, 1.0)


def pairwise_gap_matrix(phi: np.ndarray, grads: np.ndarray, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised gaps over all ordered pairs of points.

    Returns (D, S) with D[i, j] = D(points[j]; points[i], grads[i]) and S the
    matching cancellation scale.
    """
    steps = points[None, :, :] - points[:, None, :]
    linear = np.einsum('ik,ijk->ij', grads, steps)
    gaps = (phi[None, :] - phi[:, None]) - linear
    scales = np.abs(phi)[None, :] + np.abs(phi)[:, None] + np.abs(linear)
    return gaps, scales
