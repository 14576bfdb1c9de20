"""
Tests for Bregman gaps, the monotone gap and the characterization residuals.
"""
import math

import numpy as np
import pytest
from hypothesis import assume, given, seed, settings
from hypothesis import strategies as st

from engulfing.helpers.error_handlers import DimensionMismatchError, InvalidParameterError, KinkPointError
from engulfing.models.function_spec import SubgradientPair
from engulfing.services.bregman_core import (bregman_gap, characterization_residual, gap_value, gap_with_scale,
                                             interpolation_residual, is_null_gap, monotone_gap,
                                             pairwise_constant, pairwise_gap_matrix, ratio_from_gaps,
                                             symmetry_ratio, worst_characterization_residual)
from engulfing.repositories.catalog_repository import CATALOG_ORDER
from engulfing.services.convex_oracle import add_affine, catalog_function, gradient
from engulfing.services.experiments_report import exp_closed_ratio

QUARTIC_CONSTANT = 2.0 + math.sqrt(3.0)
COORDINATE = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)


def _pair(f, x):
    return SubgradientPair([x], gradient(f, [x]))


@pytest.mark.unit
class TestGaps:
    """Test single gaps"""

    def test_bregman_gap_quad(self, quad):
        """D(y; x, 2x) = (y - x)² for x²"""
        gap = bregman_gap(quad, _pair(quad, 1.0), [4.0])
        assert gap.value == 9.0
        assert gap.base == [1.0]
        assert gap.slope == [2.0]
        assert gap.target == [4.0]

    def test_bregman_gap_at_kink_with_subgradient(self, abs_fn):
        """Any slope in [-1, 1] is admissible at the kink"""
        base = SubgradientPair([0.0], [0.5])
        assert bregman_gap(abs_fn, base, [2.0]).value == 1.0
        assert bregman_gap(abs_fn, base, [-2.0]).value == 3.0

    def test_monotone_gap(self, quartic):
        a, b = _pair(quartic, 1.0), _pair(quartic, -1.0)
        # (4 - (-4)) * (1 - (-1))
        assert monotone_gap(quartic, a, b) == 16.0

    def test_dimension_mismatch(self, quad):
        with pytest.raises(DimensionMismatchError):
            bregman_gap(quad, _pair(quad, 1.0), [1.0, 2.0])

    def test_gap_with_scale(self, quad):
        gap, scale = gap_with_scale(quad, np.array([1.0]), np.array([2.0]), np.array([3.0]))
        assert gap == 4.0
        assert scale == 1.0 + 9.0 + 4.0

    def test_null_gap_policy(self):
        assert is_null_gap(0.0, 1.0)
        assert is_null_gap(1e-15, 100.0)
        assert not is_null_gap(1e-6, 1.0)

    def test_pairwise_gap_matrix(self):
        """Entry [i, j] is D(points[j]; points[i], grads[i])"""
        points = np.array([[0.0], [1.0], [3.0]])
        phi = points[:, 0] ** 2
        grads = 2.0 * points
        gaps, scales = pairwise_gap_matrix(phi, grads, points)
        expected = (points[:, 0][None, :] - points[:, 0][:, None]) ** 2
        assert np.allclose(gaps, expected)
        assert np.all(np.diag(gaps) == 0.0)
        assert scales.shape == (3, 3)


@pytest.mark.unit
class TestSymmetryRatio:
    """Test the ratio D(x; y) / D(y; x) and the minimal constant"""

    def test_quad_is_symmetric(self, quad):
        assert symmetry_ratio(quad, [1.0], [3.0]) == 1.0
        assert pairwise_constant(quad, [1.0], [3.0]) == 1.0

    def test_quartic_worst_pair(self, quartic):
        """The sup over pairs is attained on the ray y = -(2 + √3)x"""
        r = symmetry_ratio(quartic, [1.0], [-QUARTIC_CONSTANT])
        assert max(r, 1.0 / r) == pytest.approx(QUARTIC_CONSTANT, rel=1e-9)
        assert pairwise_constant(quartic, [1.0], [-QUARTIC_CONSTANT]) == pytest.approx(QUARTIC_CONSTANT, rel=1e-9)

    def test_quartic_origin_pair(self, quartic):
        """D(0; y) = 3y⁴ and D(y; 0) = y⁴"""
        assert symmetry_ratio(quartic, [2.0], [0.0]) == pytest.approx(1.0 / 3.0)
        assert pairwise_constant(quartic, [2.0], [0.0]) == pytest.approx(3.0)

    @pytest.mark.parametrize('h, expected', [(5.0, 4.17555), (10.0, 9.00454)])
    def test_exp_ratio(self, exp_fn, h, expected):
        ratio = symmetry_ratio(exp_fn, [0.0], [h])
        assert ratio == pytest.approx(exp_closed_ratio(h), rel=1e-9)
        assert ratio == pytest.approx(expected, rel=1e-4)

    def test_expsq_ratio_grows_quadratically(self):
        """Ratio at (0, h) is about 2h² - 1"""
        f = catalog_function('expsq')
        assert symmetry_ratio(f, [0.0], [10.0]) == pytest.approx(199.0, rel=1e-6)

    def test_affine_null_gaps(self, affine):
        """Both gaps vanish: ratio 1 by the null-gap policy"""
        assert symmetry_ratio(affine, [0.0], [5.0]) == 1.0

    def test_strip_direction_with_null_gaps(self, strip2d):
        assert symmetry_ratio(strip2d, [1.0, 0.0], [1.0, 5.0]) == 1.0

    def test_same_point(self, quad):
        with pytest.raises(InvalidParameterError):
            symmetry_ratio(quad, [1.0], [1.0])

    def test_kink_point(self, abs_fn):
        with pytest.raises(KinkPointError):
            symmetry_ratio(abs_fn, [0.0], [1.0])

    @pytest.mark.parametrize('args, expected', [
        ((2.0, 1.0, 1.0, 1.0), 2.0),
        ((0.0, 1.0, 1.0, 1.0), 0.0),
        ((1.0, 1.0, 0.0, 1.0), math.inf),
        ((0.0, 1.0, 0.0, 1.0), 1.0),
    ])
    def test_ratio_from_gaps(self, args, expected):
        assert ratio_from_gaps(*args) == expected


@pytest.mark.unit
class TestCharacterization:
    """Test the two-sided characterization and its interpolation form"""

    def test_residual_fields(self, quartic):
        a, b = _pair(quartic, 1.0), _pair(quartic, -1.0)
        residual = characterization_residual(quartic, a, b, 2.0)
        # D(-1; 1, 4) = 1 - 1 - 4·(-2) = 8 and M = 16
        assert residual.bregman_gap == 8.0
        assert residual.monotone_gap == 16.0
        assert residual.lower_slack == 16.0 - 1.5 * 8.0
        assert residual.upper_slack == 3.0 * 8.0 - 16.0
        assert residual.holds()

    def test_residual_fails_below_pair_constant(self, quartic):
        a, b = _pair(quartic, 1.0), _pair(quartic, -QUARTIC_CONSTANT)
        assert characterization_residual(quartic, a, b, QUARTIC_CONSTANT * 1.001).holds()
        assert not characterization_residual(quartic, a, b, 3.0).holds()

    def test_interpolation_matches_characterization(self, quartic):
        a, b = _pair(quartic, 1.0), _pair(quartic, -QUARTIC_CONSTANT)
        assert interpolation_residual(quartic, a, b, QUARTIC_CONSTANT * 1.001).holds()
        assert not interpolation_residual(quartic, a, b, 3.0).holds()

    def test_constant_must_exceed_one(self, quad):
        with pytest.raises(InvalidParameterError):
            characterization_residual(quad, _pair(quad, 0.0), _pair(quad, 1.0), 1.0)

    def test_worst_residual_at_kink(self, abs_fn):
        """The slope -1 at 0 breaks the bound against y = 0.01"""
        residual = worst_characterization_residual(abs_fn, [0.0], [0.01], 100.0)
        assert residual.worst_slack < 0


@pytest.mark.property
class TestGapProperties:
    """Property-based checks on smooth catalog functions (fixed seed)"""

    @seed(1)
    @settings(max_examples=60, deadline=None)
    @given(x=COORDINATE, y=COORDINATE)
    def test_monotone_gap_splits(self, x, y):
        """M = D(y; x, p) + D(x; y, q)"""
        for tag in ('quartic', 'exp', 'ex21'):
            f = catalog_function(tag)
            a, b = _pair(f, x), _pair(f, y)
            forward = bregman_gap(f, a, [y]).value
            backward = bregman_gap(f, b, [x]).value
            scale = 1.0 + abs(f.body.value([x])) + abs(f.body.value([y])) + abs(forward) + abs(backward)
            assert monotone_gap(f, a, b) == pytest.approx(forward + backward, abs=1e-9 * scale)

    @seed(2)
    @settings(max_examples=60, deadline=None)
    @given(x=COORDINATE, y=COORDINATE)
    def test_gaps_nonnegative(self, x, y):
        for tag in ('quad', 'quartic', 'exp', 'ex21', 'expsq'):
            f = catalog_function(tag)
            gap, scale = gap_with_scale(f, np.array([x]), gradient(f, [x]), np.array([y]))
            assert gap >= -1e-12 * scale

    @seed(3)
    @settings(max_examples=60, deadline=None)
    @given(x=COORDINATE, y=COORDINATE)
    def test_characterization_holds_at_pair_constant(self, x, y):
        """Both slacks are non-negative at the minimal constant of the pair"""
        assume(abs(x - y) > 1e-2)
        f = catalog_function('quartic')
        K = pairwise_constant(f, [x], [y]) * (1.0 + 1e-9)
        residual = characterization_residual(f, _pair(f, x), _pair(f, y), K)
        tolerance = 1e-8 * (1.0 + residual.monotone_gap)
        assert residual.lower_slack >= -tolerance
        assert residual.upper_slack >= -tolerance
        assert K <= QUARTIC_CONSTANT * (1.0 + 1e-8)


@pytest.mark.slow
class TestGapIdentities:
    """Identities on 10⁴ seeded pairs per function"""

    PAIRS = 10_000

    @pytest.mark.parametrize('tag', CATALOG_ORDER)
    def test_monotone_gap_is_sum_of_gaps(self, tag):
        f = catalog_function(tag)
        rng = np.random.default_rng(20)
        points = rng.uniform(-3.0, 3.0, size=(2 * self.PAIRS, f.dimension))
        for x, y in zip(points[::2], points[1::2]):
            p, q = gradient(f, x), gradient(f, y)
            forward = gap_value(f, x, p, y)
            backward = gap_value(f, y, q, x)
            monotone = float(np.dot(p - q, x - y))
            scale = (abs(f.body.value(x)) + abs(f.body.value(y)) + abs(float(np.dot(p, y - x)))
                     + abs(float(np.dot(q, x - y))))
            assert abs(monotone - (forward + backward)) <= 1e-9 * max(scale, abs(monotone), 1e-300)

    @pytest.mark.parametrize('tag', ['quartic', 'exp', 'ex21', 'expsq'])
    def test_ratio_reciprocity(self, tag):
        f = catalog_function(tag)
        rng = np.random.default_rng(21)
        checked = 0
        for x, y in rng.uniform(-2.0, 2.0, size=(1000, 2)):
            if abs(x - y) < 1e-2:
                continue
            forward, backward = symmetry_ratio(f, [x], [y]), symmetry_ratio(f, [y], [x])
            if forward in (0.0, math.inf) or backward in (0.0, math.inf):
                continue
            assert forward * backward == pytest.approx(1.0, rel=1e-9)
            checked += 1
        assert checked > 900

    @pytest.mark.parametrize('tag', ['quartic', 'exp', 'ex21'])
    def test_characterization_iff_ratio_bounds(self, tag):
        """Both slacks are non-negative exactly when 1/K <= r <= K"""
        f = catalog_function(tag)
        rng = np.random.default_rng(22)
        holds_count = fails_count = 0
        for _ in range(self.PAIRS):
            x, y = rng.uniform(-4.0, 4.0, size=2)
            K = float(rng.uniform(1.01, 20.0))
            if abs(x - y) < 1e-2:
                continue
            r = symmetry_ratio(f, [x], [y])
            if abs(r - K) <= 1e-6 * K or abs(r - 1.0 / K) <= 1e-6 / K:
                continue
            residual = characterization_residual(f, _pair(f, x), _pair(f, y), K)
            holds = residual.lower_slack >= 0 and residual.upper_slack >= 0
            assert holds == (1.0 / K <= r <= K)
            if holds:
                holds_count += 1
            else:
                fails_count += 1
        assert holds_count > 0
        if tag != 'quartic':
            assert fails_count > 0

    @pytest.mark.parametrize('tag, a, b', [
        ('quartic', [3.0], 2.0),
        ('exp', [-1.5], 0.25),
        ('polyquad', [1.0, -2.0], 5.0),
    ])
    def test_affine_perturbation_changes_no_gap(self, tag, a, b):
        f = catalog_function(tag)
        g = add_affine(f, a, b)
        rng = np.random.default_rng(23)
        points = rng.uniform(-2.0, 2.0, size=(400, f.dimension))
        for x, y in zip(points[::2], points[1::2]):
            if np.linalg.norm(x - y) < 0.1:
                continue
            a_f, b_f = SubgradientPair(x, gradient(f, x)), SubgradientPair(y, gradient(f, y))
            a_g, b_g = SubgradientPair(x, gradient(g, x)), SubgradientPair(y, gradient(g, y))
            scale = 1.0 + abs(g.body.value(x)) + abs(g.body.value(y)) + float(np.abs(a_g.slope).sum() * 4.0)
            assert bregman_gap(g, a_g, y).value == pytest.approx(bregman_gap(f, a_f, y).value, abs=1e-12 * scale)
            assert monotone_gap(g, a_g, b_g) == pytest.approx(monotone_gap(f, a_f, b_f), abs=1e-12 * scale)
            assert symmetry_ratio(g, x, y) == pytest.approx(symmetry_ratio(f, x, y), rel=1e-9)
