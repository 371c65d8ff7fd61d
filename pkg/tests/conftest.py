"""Shared corpus builders for the test suite.

Random spaces are drawn with a fixed seed per test; distances are built
metric-by-construction by embedding points in a low-dimensional cube or by
shortest-path completion of random weights.
"""

import numpy as np
import pytest

from mmslab import core


def random_embedded_space(rng, n, dim=3, scale=1.0):
    """Random points in a Euclidean cube: all metric axioms hold exactly."""
    pts = rng.uniform(0.0, scale, size=(n, dim))
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    mass = rng.dirichlet(np.ones(n) * 2.0)
    mass = np.maximum(mass, 1e-3)
    mass = mass / mass.sum()
    return core.space([f"p{i}" for i in range(n)], dist, mass, coords=pts)


def random_shortest_path_space(rng, n, scale=1.0):
    """Random symmetric weights completed to a metric by Floyd-Warshall."""
    raw = rng.uniform(0.2, 1.0, size=(n, n)) * scale
    raw = 0.5 * (raw + raw.T)
    np.fill_diagonal(raw, 0.0)
    for k in range(n):
        raw = np.minimum(raw, raw[:, k][:, None] + raw[k][None, :])
    mass = rng.dirichlet(np.ones(n))
    mass = np.maximum(mass, 1e-3)
    mass = mass / mass.sum()
    return core.space([f"q{i}" for i in range(n)], raw, mass)


def corpus(seed, count, sizes=(2, 3, 4, 5), dim=3):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.choice(sizes))
        if k % 2:
            out.append(random_embedded_space(rng, n, dim=dim))
        else:
            out.append(random_shortest_path_space(rng, n))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
