"""Seeded generators for the random suites.

Each instance draws from ``numpy.random.default_rng([seed, index])`` so a suite
can be split across workers without changing any instance.
"""

from __future__ import annotations

import numpy as np

from .jensen import DiscreteDistribution
from .planar import Polygon, _hull_indices

DEFAULT_SEED = 20160610
POLYGON_SIZES = (3, 8)
RADIUS_RANGE = (0.2, 1.0)


def instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def random_polygon(rng: np.random.Generator, k: int | None = None, max_tries: int = 10_000) -> Polygon:
    """Sorted uniform angles, radii uniform in [0.2, 1]; rejected unless every
    point is a hull vertex and the origin is strictly inside."""
    m = int(rng.integers(POLYGON_SIZES[0], POLYGON_SIZES[1] + 1)) if k is None else k
    for _ in range(max_tries):
        theta = np.sort(rng.uniform(0, 2 * np.pi, m))
        gaps = np.diff(np.concatenate([theta, [theta[0] + 2 * np.pi]]))
        if gaps.max() >= np.pi:
            continue
        r = rng.uniform(*RADIUS_RANGE, m)
        pts = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        if len(_hull_indices(pts)) != m:
            continue
        try:
            return Polygon(pts)
        except ValueError:
            continue
    raise RuntimeError("random_polygon: rejection sampling did not terminate")


def random_polygon_pair(seed: int, index: int) -> tuple[Polygon, Polygon]:
    rng = instance_rng(seed, index)
    return random_polygon(rng), random_polygon(rng)


def _values(rng: np.random.Generator, size: int) -> np.ndarray:
    kind = rng.integers(7)
    if kind == 0:
        f = rng.uniform(0, 1, size)
    elif kind == 1:
        f = rng.exponential(1.0, size)
    elif kind == 2:
        f = rng.lognormal(0.0, 2.0, size)
    elif kind == 3:
        f = rng.pareto(1.5, size)
    elif kind == 4:
        # sparse: many exact zeros
        f = rng.exponential(1.0, size) * (rng.uniform(size=size) < 0.3)
    elif kind == 5:
        # near constant
        f = 1.0 + rng.normal(0, 10.0 ** rng.uniform(-6, -1), size)
        f = np.abs(f)
    else:
        # one dominant atom
        f = rng.uniform(0, 1e-3, size)
        f[rng.integers(size)] = 1.0
    if not np.any(f > 0):
        f[0] = 1.0
    return f


def random_distribution(rng: np.random.Generator, sizes: tuple[int, int] = (2, 50)) -> DiscreteDistribution:
    size = int(rng.integers(sizes[0], sizes[1] + 1))
    w = rng.exponential(1.0, size) + 1e-9
    w = w / w.sum()
    return DiscreteDistribution(w, _values(rng, size))
