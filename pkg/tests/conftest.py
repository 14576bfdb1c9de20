"""
Pytest configuration and fixtures for the engulfing toolkit.
Provides catalog functions and small sampler settings that keep the
seeded checks fast.
"""
import logging

import pytest

from engulfing.models.config_models import RefineConfig, SamplerConfig
from engulfing.services.convex_oracle import catalog_function


@pytest.fixture
def quad():
    """x²"""
    return catalog_function('quad')


@pytest.fixture
def quartic():
    """x⁴"""
    return catalog_function('quartic')


@pytest.fixture
def abs_fn():
    """|x|, kink at 0"""
    return catalog_function('abs')


@pytest.fixture
def exp_fn():
    return catalog_function('exp')


@pytest.fixture
def affine():
    """2x + 1: every section is the whole line"""
    return catalog_function('affine')


@pytest.fixture
def strip2d():
    """(x, y) ↦ x²: sections are strips"""
    return catalog_function('strip2d')


@pytest.fixture
def polyquad():
    return catalog_function('polyquad')


@pytest.fixture
def ex21():
    """x² for x < 0, x⁴ for x ≥ 0"""
    return catalog_function('ex21')


@pytest.fixture
def small_sampler():
    """Sampler settings for quick checks; same seed every run"""
    return SamplerConfig(samples=400, convexity_triples=200, directions=8, seed=7)


@pytest.fixture
def fast_refine():
    """Coarse grid and few pattern-search rounds"""
    return RefineConfig(grid=120, rounds=20)


@pytest.fixture
def restore_logging():
    """
    Keep root handlers intact across tests that call setup_logging
    (the CLI and init_toolkit replace them).
    """
    root = logging.getLogger()
    handlers = list(root.handlers)
    level = root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
