"""
Section shapes: intervals in dimension 1, radial boundaries otherwise.
"""
import math
from typing import List, Union

from pydantic import BaseModel, ConfigDict, Field


class Interval1D(BaseModel):
    """Open interval (lower, upper); infinite ends mean the section is unbounded that way."""
    model_config = ConfigDict(frozen=True)

    kind: str = 'interval'
    lower: float
    upper: float
    cap_classified: int = Field(0, description="Ends declared infinite because the search hit the radius cap")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


class RadialBoundary(BaseModel):
    """Boundary radii of a star-shaped section along sampled unit directions."""
    model_config = ConfigDict(frozen=True)

    kind: str = 'radial'
    center: List[float]
    directions: List[List[float]]
    radii: List[float]
    cap_classified: int = 0

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(r) for r in self.radii)


Section = Union[Interval1D, RadialBoundary]
