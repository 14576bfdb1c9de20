"""
Result models for gap and residual computations.
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class BregmanGap(BaseModel):
    """Bregman gap D(y; x, p) = φ(y) - φ(x) - p·(y - x)."""
    model_config = ConfigDict(frozen=True)

    value: float
    base: List[float]
    slope: List[float]
    target: List[float]


class CharacterizationResidual(BaseModel):
    """
    Slacks of the two-sided characterization
    (K+1)/K · D(y; x, p) <= (p - q)·(x - y) <= (K+1) · D(y; x, p).
    """
    model_config = ConfigDict(frozen=True)

    K: float
    lower_slack: float
    upper_slack: float
    bregman_gap: float
    monotone_gap: float

    @property
    def worst_slack(self) -> float:
        return min(self.lower_slack, self.upper_slack)

    def holds(self, tolerance: float = 1e-9) -> bool:
        return self.lower_slack >= -tolerance and self.upper_slack >= -tolerance


class InterpolationResidual(BaseModel):
    """
    Slacks of the two-sided bound on φ(x) - φ(y) by convex combinations
    of (p + Kq)/(K+1) and (q + Kp)/(K+1) applied to x - y.
    """
    model_config = ConfigDict(frozen=True)

    K: float
    left_slack: float
    right_slack: float

    def holds(self, tolerance: float = 1e-9) -> bool:
        return self.left_slack >= -tolerance and self.right_slack >= -tolerance


class ConvexityCheckResult(BaseModel):
    """Outcome of the sampled midpoint-convexity check."""
    passed: bool
    pairs_checked: int
    witness_x: Optional[List[float]] = None
    witness_y: Optional[List[float]] = None
    midpoint_excess: Optional[float] = Field(None, description="φ(mid) - (φ(x)+φ(y))/2 at the witness")
