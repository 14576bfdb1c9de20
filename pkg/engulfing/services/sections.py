"""
Sections S(x₀, p, t) = {y : D(y; x₀, p) < t}: membership, 1D intervals,
boundary radii along rays and seeded member sampling.

The gap is nondecreasing along every ray from x₀, so a boundary is found by
doubling the radius from 1 until the gap reaches t (or the radius passes the
cap, which classifies the ray as unbounded) and bisecting the bracket.
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..helpers.error_handlers import KinkPointError
from ..helpers.validators import require_positive_height, require_unit_vector, require_vector
from ..models.config_models import SamplerConfig
from ..models.function_spec import FunctionSpec
from ..models.section import Interval1D, RadialBoundary, Section
from .bregman_core import gap_value
from .convex_oracle import subgradients
from .sampling import draw_direction, draw_point, task_rng

logger = logging.getLogger(__name__)

BISECTION_TOLERANCE = 1e-12
BISECTION_ITERATIONS = 60
DEFAULT_R_CAP = 1e12


def contains(f: FunctionSpec, x0, p, t: float, y) -> bool:
    """True iff D(y; x₀, p) < t (the section is open)."""
    t = require_positive_height(t)
    base = require_vector(x0, f.dimension, "x0")
    slope = require_vector(p, f.dimension, "p")
    target = require_vector(y, f.dimension, "y")
    return gap_value(f, base, slope, target) < t


def _member(f: FunctionSpec, x0: np.ndarray, p: np.ndarray, t: float, y: np.ndarray) -> bool:
    return gap_value(f, x0, p, y) < t


def ray_bracket(f: FunctionSpec, x0: np.ndarray, p: np.ndarray, t: float, direction: np.ndarray,
                r_cap: float = DEFAULT_R_CAP) -> Optional[Tuple[float, float]]:
    """
    Bracket (lo, hi) of the boundary radius with gap(lo) < t <= gap(hi),
    bisected to width 1e-12 or 60 iterations; None when the ray is unbounded.
    """
    base_value = f.body.value(x0)
    slope = float(np.dot(p, direction))

    def gap_at(r: float) -> float:
        return f.body.value(x0 + r * direction) - base_value - r * slope

    lo, hi = 0.0, 1.0
    while gap_at(hi) < t:
        if hi > r_cap:
            return None
        lo, hi = hi, 2.0 * hi
    for _ in range(BISECTION_ITERATIONS):
        if hi - lo <= BISECTION_TOLERANCE:
            break
        mid = 0.5 * (lo + hi)
        if gap_at(mid) < t:
            lo = mid
        else:
            hi = mid
    return lo, hi


def boundary_radius(f: FunctionSpec, x0, p, t: float, direction, r_cap: float = DEFAULT_R_CAP) -> float:
    """
    Radius r with D(x₀ + r·direction; x₀, p) = t, or +inf when the gap stays
    below t out to the cap.
    """
    t = require_positive_height(t)
    base = require_vector(x0, f.dimension, "x0")
    slope = require_vector(p, f.dimension, "p")
    unit = require_unit_vector(direction, f.dimension)
    bracket = ray_bracket(f, base, slope, t, unit, r_cap)
    if bracket is None:
        logger.debug(f"Ray {unit.tolist()} from {base.tolist()} classified unbounded at cap {r_cap}")
        return math.inf
    return 0.5 * (bracket[0] + bracket[1])


def solve_interval_1d(f: FunctionSpec, x0, p, t: float, r_cap: float = DEFAULT_R_CAP) -> Interval1D:
    """
    The 1D section as an open interval (a, b) around x₀; infinite ends are
    cap-classified unbounded rays.
    """
    t = require_positive_height(t)
    base = require_vector(x0, 1, "x0")
    slope = require_vector(p, 1, "p")
    ends = []
    capped = 0
    for sign in (-1.0, 1.0):
        bracket = ray_bracket(f, base, slope, t, np.array([sign]), r_cap)
        if bracket is None:
            capped += 1
            ends.append(sign * math.inf)
        else:
            ends.append(float(base[0]) + sign * 0.5 * (bracket[0] + bracket[1]))
    return Interval1D(lower=ends[0], upper=ends[1], cap_classified=capped)


def section_directions(dimension: int, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    """±1 in 1D, evenly spaced angles in 2D, seeded random unit vectors otherwise."""
    if dimension == 1:
        return [np.array([-1.0]), np.array([1.0])]
    if dimension == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return [np.array([math.cos(a), math.sin(a)]) for a in angles]
    return [draw_direction(rng, dimension) for _ in range(count)]


def compute_section(f: FunctionSpec, x0, p, t: float, sampler: Optional[SamplerConfig] = None) -> Section:
    """Interval1D in dimension 1, RadialBoundary over sampled directions otherwise."""
    sampler = sampler or SamplerConfig()
    if f.dimension == 1:
        return solve_interval_1d(f, x0, p, t, sampler.r_cap)
    t = require_positive_height(t)
    base = require_vector(x0, f.dimension, "x0")
    slope = require_vector(p, f.dimension, "p")
    rng = task_rng(sampler.seed, 0x5EC)
    directions = section_directions(f.dimension, sampler.directions, rng)
    radii = []
    for d in directions:
        bracket = ray_bracket(f, base, slope, t, d, sampler.r_cap)
        radii.append(math.inf if bracket is None else 0.5 * (bracket[0] + bracket[1]))
    capped = sum(1 for r in radii if math.isinf(r))
    if capped:
        logger.warning(f"{capped} of {len(radii)} rays of the section of {f.label} are cap-classified unbounded")
    return RadialBoundary(center=base.tolist(), directions=[d.tolist() for d in directions], radii=radii,
                          cap_classified=capped)


class SectionSampler:
    """
    Draws members of one section S(x₀, p, t), caching ray brackets.

    Finite rays give a point uniformly along the ray or the inner end of the
    boundary bracket (gap just below t); unbounded rays give log-uniform
    radii up to `unbounded_radius`.
    """

    def __init__(self, f: FunctionSpec, x0: np.ndarray, p: np.ndarray, t: float,
                 r_cap: float = DEFAULT_R_CAP, unbounded_radius: float = 1e6):
        self.f = f
        self.x0 = x0
        self.p = p
        self.t = t
        self.r_cap = r_cap
        self.unbounded_radius = unbounded_radius
        self.cap_classified = 0
        self._brackets: Dict[float, Optional[Tuple[float, float]]] = {}

    def bracket(self, direction: np.ndarray) -> Optional[Tuple[float, float]]:
        if self.f.dimension == 1:
            key = float(direction[0])
            if key not in self._brackets:
                self._brackets[key] = ray_bracket(self.f, self.x0, self.p, self.t, direction, self.r_cap)
            return self._brackets[key]
        return ray_bracket(self.f, self.x0, self.p, self.t, direction, self.r_cap)

    def draw(self, rng: np.random.Generator, near_boundary: bool) -> Optional[np.ndarray]:
        """One member of the section, or None when rounding pushed the point out."""
        direction = draw_direction(rng, self.f.dimension)
        u = rng.random()
        bracket = self.bracket(direction)
        if bracket is None:
            self.cap_classified += 1
            radius = 10.0 ** (u * math.log10(self.unbounded_radius))
        else:
            radius = bracket[0] if near_boundary else u * bracket[0]
        y = self.x0 + radius * direction
        return y if _member(self.f, self.x0, self.p, self.t, y) else None


def sample_section(f: FunctionSpec, x0, p, t: float, sampler: Optional[SamplerConfig] = None,
                   rng: Optional[np.random.Generator] = None) -> List[np.ndarray]:
    """
    Members of S(x₀, p, t): the base point, `section_samples` points per
    direction and a near-boundary point on every finite ray.
    """
    sampler = sampler or SamplerConfig()
    t = require_positive_height(t)
    base = require_vector(x0, f.dimension, "x0")
    slope = require_vector(p, f.dimension, "p")
    rng = rng if rng is not None else task_rng(sampler.seed, 0x5A)
    points = [base.copy()]
    capped = 0
    for direction in section_directions(f.dimension, sampler.directions, rng):
        bracket = ray_bracket(f, base, slope, t, direction, sampler.r_cap)
        if bracket is None:
            capped += 1
            radii = 10.0 ** rng.uniform(0.0, math.log10(sampler.r_cap), sampler.section_samples)
        else:
            radii = np.append(rng.random(sampler.section_samples) * bracket[0], bracket[0])
        points.extend(base + r * direction for r in radii)
    members = [y for y in points if _member(f, base, slope, t, y)]
    if capped:
        logger.warning(f"Section of {f.label} sampled along {capped} cap-classified unbounded rays")
    logger.debug(f"Sampled {len(members)} of {len(points)} candidate members of S({base.tolist()}, t={t})")
    return members


def classify_boundedness(f: FunctionSpec, sampler: Optional[SamplerConfig] = None) -> str:
    """
    'bounded', 'unbounded' or 'mixed' from rays cast from sampled base points
    and heights 0.1, 1, 10.
    """
    sampler = sampler or SamplerConfig()
    rng = task_rng(sampler.seed, 0xB0)
    n = f.dimension
    bases = [np.zeros(n)] + [draw_point(rng, n, sampler.box, 1e-2) for _ in range(3)]
    directions = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        directions.extend([e, -e])
    if n > 1:
        directions.extend(draw_direction(rng, n) for _ in range(4))
    bounded = unbounded = 0
    for x0 in bases:
        try:
            p = subgradients(f, x0)[0]
        except KinkPointError:
            continue
        for t in (0.1, 1.0, 10.0):
            for d in directions:
                if ray_bracket(f, x0, p, t, d, sampler.r_cap) is None:
                    unbounded += 1
                else:
                    bounded += 1
    if unbounded == 0:
        kind = 'bounded'
    elif bounded == 0:
        kind = 'unbounded'
    else:
        kind = 'mixed'
    logger.debug(f"Sections of {f.label}: {kind} ({bounded} bounded, {unbounded} unbounded rays)")
    return kind
