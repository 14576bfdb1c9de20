"""
Verdicts and estimates produced by the engulfing checks.
"""
import math
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field


class EngulfingWitness(BaseModel):
    """
    A sampled configuration refuting the engulfing property.

    Soft mode: y ∈ S(x, p, t) while x ∉ S(y, q, K·t).
    Full mode: y ∈ S(x, p, t) while z ∈ S(x, p, t) \\ S(y, q, K·t).
    """
    mode: Literal['soft', 'full']
    x: List[float]
    p: List[float]
    t: float
    y: List[float]
    q: List[float]
    z: Optional[List[float]] = None
    K: float
    forward_gap: float = Field(description="D(y; x, p), below t")
    backward_gap: float = Field(description="D(x; y, q) or D(z; y, q), at least K·t")


class EngulfingVerdict(BaseModel):
    mode: Literal['soft', 'full']
    K: float
    verdict: Literal['pass', 'fail']
    witness: Optional[EngulfingWitness] = None
    samples_used: int
    skipped: int = 0
    seed: int
    function: str = 'anonymous'
    derivative_mode: str = 'analytic'
    cap_classified_rays: int = 0
    diverging: bool = False

    @property
    def passed(self) -> bool:
        return self.verdict == 'pass'


class LevelRecord(BaseModel):
    """One estimation level of the characterization constant."""
    box: float
    inner_scale: float
    grid_value: float
    refined_value: float
    last_round_growth: float = 0.0


class KEstimate(BaseModel):
    """Estimate of the smallest K for which the characterization holds."""
    value: float
    argmax_pair: Optional[Tuple[List[float], List[float]]] = None
    diverging: bool = False
    infinite_reason: Optional[Literal['kink', 'flat-segment']] = None
    grid: int
    box: float
    seed: int
    refinement_rounds: int
    levels: List[LevelRecord] = Field(default_factory=list)
    ill_conditioned_pairs: int = 0
    flat_segment_candidates: int = 0
    derivative_mode: str = 'analytic'

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value) and not self.diverging


class EquivalenceReport(BaseModel):
    """Soft engulfing at the estimated constant and full engulfing at 2K(K+1)."""
    estimate: KEstimate
    soft_K: Optional[float] = None
    full_K: Optional[float] = None
    soft: Optional[EngulfingVerdict] = None
    full: Optional[EngulfingVerdict] = None
    conclusion: str


class KinkRecord(BaseModel):
    point: List[float]
    lower_slope: Optional[float] = None
    upper_slope: Optional[float] = None
    axis: Optional[int] = None
    worst_slack: Optional[float] = None
    breaks_characterization: bool = False


class FlatSegmentRecord(BaseModel):
    start: List[float]
    end: List[float]


class RegularityReport(BaseModel):
    """Located kinks and flat segments of a function."""
    function: str
    trial_K: float
    kinks: List[KinkRecord] = Field(default_factory=list)
    flat_segments: List[FlatSegmentRecord] = Field(default_factory=list)
    sections: str = 'bounded'
    evidence: List[str] = Field(default_factory=list)

    @property
    def differentiable(self) -> bool:
        return not self.kinks

    @property
    def strictly_convex_evidence(self) -> bool:
        return not self.flat_segments


@dataclass(frozen=True, eq=False)
class SampledTriple:
    """A pair (x, p), (y, q) seen by a soft check, kept when tracing."""
    x: np.ndarray
    p: np.ndarray
    y: np.ndarray
    q: np.ndarray
    t: float
