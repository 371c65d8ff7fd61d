"""Construction of the example spaces and approximation sequences used in
experiments and tests: interval grids, sampled Gaussian and sphere spaces,
atom spaces on a line segment, equidistant dissipation families, and product
towers with their projection witnesses.

Sampled generators require a seed and are bit-reproducible; every constructed
space satisfies the structural invariants (validated eagerly up to a size
threshold, above which validity holds by construction).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .atoms import AtomVector
from .core import FinitePmSpace, InputError, check_valid, product
from .functional import GridSpace1D, gaussian_grid, unit_interval_grid  # noqa: F401
from .order import DominationWitness

_VALIDATE_LIMIT = 300


def _finish(points, dist, mass, mass_rational=None, coords=None):
    sp = FinitePmSpace(points, dist, mass, mass_rational, coords)
    if sp.n <= _VALIDATE_LIMIT:
        check_valid(sp)
    return sp


def two_point(d=1.0, first_mass=0.5):
    if not (d > 0 and 0 < first_mass < 1):
        raise InputError("two_point needs d > 0 and a mass in (0, 1)")
    return _finish(("x0", "x1"), [[0.0, d], [d, 0.0]], [first_mass, 1.0 - first_mass])


def interval_grid(m, r=1.0):
    """m equally spaced points spanning [0, r] with equal masses."""
    if m < 2:
        raise InputError("interval_grid needs m >= 2 points")
    if r <= 0:
        raise InputError("interval_grid needs r > 0")
    xs = np.linspace(0.0, r, m)
    dist = np.abs(xs[:, None] - xs[None, :])
    mass_rational = tuple(Fraction(1, m) for _ in range(m))
    return _finish(
        tuple(f"t{k}" for k in range(m)),
        dist,
        np.full(m, 1.0 / m),
        mass_rational,
        coords=xs.reshape(-1, 1),
    )


def gaussian_sample(n_points, dim, sigma=1.0, seed=None):
    """Empirical space of i.i.d. centred normal samples with Euclidean metric.

    Invariants computed on these spaces are estimators of the sampled law's
    invariants; columns of ``coords`` are the 1-Lipschitz projections.
    """
    if seed is None:
        raise InputError("gaussian_sample requires a seed")
    if n_points < 1 or dim < 1 or sigma <= 0:
        raise InputError("gaussian_sample needs n_points, dim >= 1 and sigma > 0")
    rng = np.random.default_rng(seed)
    pts = sigma * rng.standard_normal((n_points, dim))
    dist = squareform(pdist(pts))
    return _finish(
        tuple(f"g{k}" for k in range(n_points)),
        dist,
        np.full(n_points, 1.0 / n_points),
        coords=pts,
    )


def sphere_sample(n_dim, radius, n_points, seed=None):
    """Uniform samples on the n_dim-sphere of the given radius with chordal
    (restricted Euclidean) distance."""
    if seed is None:
        raise InputError("sphere_sample requires a seed")
    if n_dim < 1 or radius <= 0 or n_points < 1:
        raise InputError("sphere_sample needs n_dim >= 1, radius > 0, n_points >= 1")
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n_points, n_dim + 1))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    pts = radius * raw
    dist = squareform(pdist(pts))
    return _finish(
        tuple(f"s{k}" for k in range(n_points)),
        dist,
        np.full(n_points, 1.0 / n_points),
        coords=pts,
    )


def atom_space(alpha: AtomVector, m_diffuse=8):
    """Line-segment carrier: a grid on [-1, 0] sharing the non-atomic mass plus
    atom points at the positive integers."""
    atoms = [float(e) for e in alpha.entries if e > 0]
    diffuse = 1.0 - math.fsum(atoms)
    xs, masses, labels = [], [], []
    if diffuse > 1e-12:
        if m_diffuse < 1:
            raise InputError("diffuse mass needs m_diffuse >= 1 grid points")
        grid = np.linspace(-1.0, 0.0, m_diffuse)
        xs.extend(grid.tolist())
        masses.extend([diffuse / m_diffuse] * m_diffuse)
        labels.extend(f"u{k}" for k in range(m_diffuse))
    for i, a in enumerate(atoms):
        xs.append(float(i + 1))
        masses.append(a)
        labels.append(f"a{i + 1}")
    if not xs:
        raise InputError("empty atom space: zero vector with no diffuse part")
    xs = np.asarray(xs)
    dist = np.abs(xs[:, None] - xs[None, :])
    return _finish(tuple(labels), dist, masses, coords=xs.reshape(-1, 1))


def dissipation_family(alpha: AtomVector, delta, n):
    """Equidistant space with 2^n uniform points sharing the non-atomic mass
    plus the atom points, every pairwise distance equal to delta."""
    if not delta > 0:
        raise InputError("delta must be positive")
    if not 0 <= n <= 16:
        raise InputError("dissipation_family needs 0 <= n <= 16")
    atoms = [float(e) for e in alpha.entries if e > 0]
    diffuse = 1.0 - math.fsum(atoms)
    masses, labels = [], []
    if diffuse > 1e-12:
        k = 2**n
        masses.extend([diffuse / k] * k)
        labels.extend(f"y{j}" for j in range(k))
    for i, a in enumerate(atoms):
        masses.append(a)
        labels.append(f"x{i + 1}")
    size = len(masses)
    if size == 0:
        raise InputError("empty space: zero vector with no diffuse part")
    dist = np.full((size, size), float(delta))
    np.fill_diagonal(dist, 0.0)
    return _finish(tuple(labels), dist, masses)


def dissipation_projection(alpha: AtomVector, delta, n):
    """The mod-2^(n-1) projection witnessing that the level-(n-1) member is
    dominated by the level-n member."""
    big = dissipation_family(alpha, delta, n)
    small = dissipation_family(alpha, delta, n - 1)
    atoms = sum(1 for e in alpha.entries if e > 0)
    diffuse = big.n - atoms
    half = diffuse // 2
    mapping = []
    for j in range(diffuse):
        mapping.append(j % half if half else 0)
    for i in range(atoms):
        mapping.append((diffuse // 2) + i)
    push = np.zeros(small.n)
    for i, v in enumerate(mapping):
        push[v] += big.mass[i]
    return big, small, DominationWitness(tuple(mapping), tuple(push))


def product_tower(base: FinitePmSpace, p, levels, max_total=10_000):
    """Monotone tower base, base^2, ... with projection witnesses onto the
    previous level."""
    if levels < 1:
        raise InputError("levels must be >= 1")
    if base.n**levels > max_total:
        raise InputError(f"tower would exceed {max_total} points")
    towers = [base]
    witnesses = []
    for _ in range(1, levels):
        nxt = product(towers[-1], base, p)
        prev = towers[-1]
        mapping = tuple(i // base.n for i in range(nxt.n))
        push = np.zeros(prev.n)
        for i, v in enumerate(mapping):
            push[v] += nxt.mass[i]
        witnesses.append(DominationWitness(mapping, tuple(push)))
        towers.append(nxt)
    return towers, witnesses
