"""
Function specification value types.

FunctionSpec and SubgradientPair sit on the hot path of every sampler, so
they are frozen dataclasses over numpy vectors rather than pydantic models.
"""
import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np


class SmoothHint(str, enum.Enum):
    """Tri-state smoothness annotation of a function."""
    SMOOTH = 'smooth'
    HAS_KINKS = 'has-kinks'
    UNKNOWN = 'unknown'


class ConvexBody(ABC):
    """
    Evaluatable body of a convex function φ:ℝⁿ→ℝ.

    Subclasses provide values and directional derivatives φ'(x; v); the
    oracle derives gradients, one-sided slopes and kink checks from them.
    Directional derivatives must be positively homogeneous in v.
    """

    analytic: bool = True

    @abstractmethod
    def value(self, x: np.ndarray) -> float:
        """φ(x); may be ±inf on floating overflow."""

    @abstractmethod
    def directional(self, x: np.ndarray, v: np.ndarray) -> float:
        """One-sided directional derivative φ'(x; v)."""

    def central_gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient for bodies without analytic rules; analytic bodies return None."""
        return None

    def kinks_1d(self) -> Tuple[float, ...]:
        """Known points of non-differentiability (dimension 1 only)."""
        return ()

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class FunctionSpec:
    """An evaluatable convex function on ℝⁿ."""
    dimension: int
    body: ConvexBody
    smooth_hint: SmoothHint = SmoothHint.UNKNOWN
    label: str = 'anonymous'
    params: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")

    @property
    def derivative_mode(self) -> str:
        return 'analytic' if self.body.analytic else 'finite-difference'

    def __repr__(self):
        return f"<FunctionSpec(label='{self.label}', dimension={self.dimension}, smooth_hint='{self.smooth_hint.value}')>"


def _frozen_vector(value) -> np.ndarray:
    vector = np.array(value, dtype=float).reshape(-1)
    vector.setflags(write=False)
    return vector


@dataclass(frozen=True, eq=False)
class SubgradientPair:
    """A point x together with a slope p ∈ ∂φ(x)."""
    point: np.ndarray
    slope: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'point', _frozen_vector(self.point))
        object.__setattr__(self, 'slope', _frozen_vector(self.slope))
        if self.point.shape != self.slope.shape:
            raise ValueError(f"point and slope dimensions differ: {self.point.shape} vs {self.slope.shape}")

    @property
    def dimension(self) -> int:
        return int(self.point.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {'point': self.point.tolist(), 'slope': self.slope.tolist()}

    def __repr__(self):
        return f"<SubgradientPair(point={self.point.tolist()}, slope={self.slope.tolist()})>"


@dataclass(frozen=True)
class SlopeInterval:
    """Closed interval [lower, upper] of one-sided derivatives in dimension 1."""
    lower: float
    upper: float

    @property
    def is_degenerate(self) -> bool:
        return abs(self.upper - self.lower) <= 1e-9 * (1.0 + abs(self.lower) + abs(self.upper))

    def extremes(self) -> Tuple[float, ...]:
        return (self.upper,) if self.is_degenerate else (self.lower, self.upper)
