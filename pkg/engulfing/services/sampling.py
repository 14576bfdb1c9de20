"""
Seeded point, height and direction measures shared by the samplers.
"""
import math
from typing import Sequence

import numpy as np


def task_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for one task; identical for equal (seed, stream)."""
    return np.random.default_rng([seed, *stream])


def draw_point(rng: np.random.Generator, dimension: int, box: float, inner_scale: float) -> np.ndarray:
    """
    Point of [-box, box]^n with coordinates concentrated near 0, near the
    box edges and uniform in between (log-spaced magnitudes).
    """
    mode = rng.integers(0, 3, size=dimension)
    exponent = rng.uniform(math.log10(inner_scale), 0.0, size=dimension)
    uniform = rng.random(dimension)
    sign = np.where(rng.random(dimension) < 0.5, -1.0, 1.0)
    magnitude = np.where(
        mode == 0, box * 10.0 ** exponent,
        np.where(mode == 1, box * (1.0 - 10.0 ** exponent), box * uniform)
    )
    return sign * magnitude


def draw_height(rng: np.random.Generator, t_min: float, t_max: float) -> float:
    """Log-uniform height in [t_min, t_max]."""
    return float(10.0 ** rng.uniform(math.log10(t_min), math.log10(t_max)))


def draw_direction(rng: np.random.Generator, dimension: int) -> np.ndarray:
    """Uniform unit direction; ±1 in dimension 1."""
    if dimension == 1:
        return np.array([1.0 if rng.random() < 0.5 else -1.0])
    while True:
        v = rng.standard_normal(dimension)
        norm = float(np.linalg.norm(v))
        if norm > 1e-12:
            return v / norm


def grid_points_1d(box: float, count: int, inner_scale: float, anchors: Sequence[float] = ()) -> np.ndarray:
    """
    Sorted unique 1D grid: uniform points, magnitudes log-spaced toward 0 and
    toward the box edge, plus 0 and the given anchors.
    """
    quarter = max(count // 4, 2)
    logs = box * np.logspace(math.log10(inner_scale), 0.0, quarter)
    edges = box * (1.0 - np.logspace(math.log10(inner_scale), 0.0, quarter, endpoint=False))
    parts = [
        np.linspace(-box, box, count),
        logs, -logs, edges, -edges,
        np.array([0.0]),
        np.array([a for a in anchors if abs(a) <= box], dtype=float),
    ]
    return np.unique(np.concatenate(parts))
