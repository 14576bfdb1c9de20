"""
Sampler and refinement settings.
"""
from pydantic import BaseModel, ConfigDict, Field, model_validator


class SamplerConfig(BaseModel):
    """Monte-Carlo settings shared by section sampling and the engulfing checks."""
    model_config = ConfigDict(frozen=True)

    box: float = Field(10.0, gt=0, description="Half-width of the sampling box [-R, R]^n")
    samples: int = Field(10000, ge=1, description="Number of sampled triples per check")
    section_samples: int = Field(4, ge=1, description="Points drawn per direction / extra z per triple")
    directions: int = Field(16, ge=1, description="Ray directions for section sampling in dimension > 1")
    convexity_triples: int = Field(2000, ge=1, description="Random pairs for the convexity check")
    t_min: float = Field(1e-6, gt=0)
    t_max: float = Field(1e3, gt=0)
    seed: int = Field(0, ge=0)
    r_cap: float = Field(1e12, gt=1, description="Radius beyond which a ray counts as unbounded")
    unbounded_radius: float = Field(1e6, gt=0, description="Largest radius drawn on unbounded rays")
    inner_scale: float = Field(1e-6, gt=0, lt=1, description="Smallest relative magnitude drawn near 0")
    pair_seeded_fraction: float = Field(0.5, ge=0, le=1)

    @model_validator(mode='after')
    def check_heights(self):
        if self.t_min >= self.t_max:
            raise ValueError(f"t_min ({self.t_min}) must be below t_max ({self.t_max})")
        return self


class RefineConfig(BaseModel):
    """Grid and pattern-search settings for the characterization constant estimate."""
    model_config = ConfigDict(frozen=True)

    grid: int = Field(400, ge=8, description="Grid points per axis (1D) or random points (nD)")
    rounds: int = Field(40, ge=0, description="Pattern-search refinement rounds")
    shrink: float = Field(0.5, gt=0, lt=1)
    box_doublings: int = Field(1, ge=1, description="Extra estimation levels with doubled box")
    growth_threshold: float = Field(0.05, gt=0, description="Relative growth flagged as divergence")
    ill_conditioned: float = Field(1e-5, gt=0, lt=1, description="Minimum relative gap for a usable pair")
