"""
Tests for sections S(x₀, p, t): membership, intervals, boundary radii and sampling.
"""
import math

import numpy as np
import pytest

from engulfing.helpers.error_handlers import DimensionMismatchError, InvalidParameterError
from engulfing.models.config_models import SamplerConfig
from engulfing.models.section import Interval1D, RadialBoundary
from engulfing.services.bregman_core import gap_value
from engulfing.services.convex_oracle import catalog_function, gradient
from engulfing.services.sections import (boundary_radius, classify_boundedness, compute_section, contains,
                                         sample_section, solve_interval_1d)


@pytest.mark.unit
class TestMembership:
    """Test the open section membership predicate"""

    def test_contains(self, quad):
        assert contains(quad, [0.0], [0.0], 1.0, [0.5])
        assert not contains(quad, [0.0], [0.0], 1.0, [2.0])

    def test_section_is_open(self, quad):
        """D(1; 0, 0) = t is outside"""
        assert not contains(quad, [0.0], [0.0], 1.0, [1.0])

    def test_base_point_always_inside(self, quartic):
        assert contains(quartic, [3.0], [108.0], 1e-9, [3.0])

    @pytest.mark.parametrize('t', [0.0, -1.0, math.inf, math.nan])
    def test_invalid_height(self, quad, t):
        with pytest.raises(InvalidParameterError):
            contains(quad, [0.0], [0.0], t, [0.5])

    def test_dimension_mismatch(self, strip2d):
        with pytest.raises(DimensionMismatchError):
            contains(strip2d, [0.0], [0.0, 0.0], 1.0, [0.0, 0.0])


@pytest.mark.unit
class TestIntervals:
    """Test 1D sections"""

    def test_quad_interval(self, quad):
        interval = solve_interval_1d(quad, [0.0], [0.0], 1.0)
        assert interval.lower == pytest.approx(-1.0, abs=1e-9)
        assert interval.upper == pytest.approx(1.0, abs=1e-9)
        assert interval.bounded
        assert interval.width == pytest.approx(2.0, abs=1e-9)

    def test_shifted_quad_interval(self, quad):
        """S(1, 2, 4) = (-1, 3)"""
        interval = solve_interval_1d(quad, [1.0], [2.0], 4.0)
        assert interval.lower == pytest.approx(-1.0, abs=1e-9)
        assert interval.upper == pytest.approx(3.0, abs=1e-9)

    def test_exp_interval_is_asymmetric(self, exp_fn):
        """eˣ grows slower to the left: the lower end is farther away"""
        interval = solve_interval_1d(exp_fn, [0.0], [1.0], 1.0)
        assert interval.lower < 0.0 < interval.upper
        assert -interval.lower > interval.upper
        assert math.exp(interval.upper) - 1.0 - interval.upper == pytest.approx(1.0, abs=1e-9)

    def test_kink_subgradient_half_line(self, abs_fn):
        """At the kink with p = 1 the gap vanishes on the right"""
        interval = solve_interval_1d(abs_fn, [0.0], [1.0], 1.0)
        assert interval.lower == pytest.approx(-0.5, abs=1e-9)
        assert interval.upper == math.inf
        assert interval.cap_classified == 1

    def test_affine_unbounded(self, affine):
        interval = solve_interval_1d(affine, [0.0], [2.0], 1.0)
        assert (interval.lower, interval.upper) == (-math.inf, math.inf)
        assert interval.cap_classified == 2
        assert not interval.bounded

    def test_compute_section_dispatches_to_interval(self, quad):
        assert isinstance(compute_section(quad, [0.0], [0.0], 1.0), Interval1D)

    @pytest.mark.parametrize('tag, x0, t', [
        ('quartic', 1.0, 2.0),
        ('exp', -1.0, 0.5),
        ('ex21', 0.3, 0.1),
        ('quad', 2.0, 9.0),
    ])
    def test_rays_reproduce_interval_ends(self, tag, x0, t):
        f = catalog_function(tag)
        p = gradient(f, [x0])
        interval = solve_interval_1d(f, [x0], p, t)
        right = boundary_radius(f, [x0], p, t, [1.0])
        left = boundary_radius(f, [x0], p, t, [-1.0])
        assert x0 + right == pytest.approx(interval.upper, abs=1e-9)
        assert x0 - left == pytest.approx(interval.lower, abs=1e-9)


@pytest.mark.unit
class TestRadialBoundaries:
    """Test boundary radii in dimension 2"""

    def test_strip_radii(self, strip2d):
        assert boundary_radius(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-9)
        assert boundary_radius(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, [0.0, 1.0]) == math.inf
        diagonal = [math.sqrt(0.5), math.sqrt(0.5)]
        assert boundary_radius(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, diagonal) == pytest.approx(math.sqrt(2.0),
                                                                                               abs=1e-9)

    def test_direction_must_be_unit(self, strip2d):
        with pytest.raises(InvalidParameterError):
            boundary_radius(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, [2.0, 0.0])

    def test_polyquad_boundary_gaps(self, polyquad):
        """Every finite radius sits on the level set D = t"""
        x0 = np.array([1.0, -1.0])
        p = np.array([3.0, -1.0])  # 2Ax₀ for the default matrix
        section = compute_section(polyquad, x0, p, 2.0, SamplerConfig(directions=8))
        assert isinstance(section, RadialBoundary)
        assert section.bounded
        assert len(section.radii) == 8
        for direction, radius in zip(section.directions, section.radii):
            point = x0 + radius * np.array(direction)
            assert gap_value(polyquad, x0, p, point) == pytest.approx(2.0, rel=1e-9)

    def test_strip_section_counts_unbounded_rays(self, strip2d):
        section = compute_section(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, SamplerConfig(directions=4))
        # angles 0, π/2, π, 3π/2
        assert section.radii[0] == pytest.approx(1.0, abs=1e-9)
        assert math.isinf(section.radii[1])
        assert section.cap_classified == 2
        assert not section.bounded


@pytest.mark.unit
class TestSampling:
    """Test seeded member sampling and boundedness classification"""

    def test_members_are_inside(self, polyquad):
        sampler = SamplerConfig(directions=6, section_samples=3)
        x0, p = [1.0, -1.0], [3.0, -1.0]
        members = sample_section(polyquad, x0, p, 0.5, sampler)
        assert members[0].tolist() == x0
        assert len(members) > 1
        for y in members:
            assert contains(polyquad, x0, p, 0.5, y)

    def test_sampling_is_seeded(self, strip2d):
        sampler = SamplerConfig(directions=5, seed=11)
        first = sample_section(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, sampler)
        second = sample_section(strip2d, [0.0, 0.0], [0.0, 0.0], 1.0, sampler)
        assert [y.tolist() for y in first] == [y.tolist() for y in second]

    @pytest.mark.parametrize('tag, expected', [
        ('quad', 'bounded'),
        ('exp', 'bounded'),
        ('polyquad', 'bounded'),
        ('affine', 'unbounded'),
        ('strip2d', 'mixed'),
        ('abs', 'mixed'),
    ])
    def test_classify_boundedness(self, tag, expected):
        assert classify_boundedness(catalog_function(tag), SamplerConfig()) == expected

    @pytest.mark.parametrize('tag, x0, p', [
        ('polyquad', [1.0, -1.0], [3.0, -1.0]),
        ('quartic', [1.0], [4.0]),
        ('strip2d', [0.5, 1.0], [1.0, 0.0]),
    ])
    def test_members_nest_in_height(self, tag, x0, p):
        f = catalog_function(tag)
        sampler = SamplerConfig(directions=8, section_samples=4, seed=2)
        for low, high in [(0.1, 0.2), (0.5, 3.0), (1.0, 1.0 + 1e-6)]:
            for y in sample_section(f, x0, p, low, sampler):
                assert contains(f, x0, p, high, y)

    @pytest.mark.parametrize('tag, x0, p, t', [
        ('polyquad', [1.0, -1.0], [3.0, -1.0], 2.0),
        ('quartic', [1.0], [4.0], 0.5),
        ('exp', [0.0], [1.0], 1.0),
    ])
    def test_midpoints_of_members_are_members(self, tag, x0, p, t):
        f = catalog_function(tag)
        members = sample_section(f, x0, p, t, SamplerConfig(directions=6, section_samples=3, seed=5))
        assert len(members) > 2
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                assert contains(f, x0, p, t, 0.5 * (a + b))
