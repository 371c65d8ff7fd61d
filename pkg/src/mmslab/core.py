"""Finite metric measure spaces: representation, validation, measure distances,
products, scaling and isomorphism testing.

A space is stored support-only: every stored point carries strictly positive
mass and the mass vector sums to one, so ``diam`` of the stored matrix is the
diameter of the support by construction.  All values are immutable after
construction and every operation is a pure function.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Global tolerance knobs: structural validation vs. equality of derived reals.
VALIDATION_TOL = 1e-12
REAL_TOL = 1e-9

# Above this size the cubic triangle-inequality sweep loops one index to keep
# memory linear instead of materialising an n^3 tensor.
_TRIANGLE_BLOCK_LIMIT = 48


class InputError(ValueError):
    """Malformed arguments or files (CLI exit code 2)."""


class SizeLimitError(RuntimeError):
    """An exact search was requested beyond its guaranteed size (exit code 3)."""


class InvalidSpaceError(InputError):
    """A space failed structural validation; repairs are never attempted."""


@dataclass(frozen=True)
class Violation:
    """First failed invariant of a space: a code, the offending indices, and text."""

    code: str
    indices: tuple
    message: str

    def __str__(self):
        return self.message


def _freeze(a):
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FinitePmSpace:
    """Distance matrix plus probability mass vector over opaque point labels.

    ``mass_rational`` optionally carries the masses as exact fractions (used by
    the order-search module for exact pushforward matching).  ``coords``
    optionally carries sample coordinates for spaces produced by samplers; the
    metric data never depends on it.
    """

    points: tuple
    dist: np.ndarray
    mass: np.ndarray
    mass_rational: tuple | None = None
    coords: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "dist", _freeze(self.dist))
        object.__setattr__(self, "mass", _freeze(self.mass))
        if self.coords is not None:
            object.__setattr__(self, "coords", _freeze(self.coords))
        if self.mass_rational is not None:
            object.__setattr__(
                self, "mass_rational", tuple(Fraction(r) for r in self.mass_rational)
            )

    @property
    def n(self):
        return len(self.points)

    def diam(self):
        return float(self.dist.max()) if self.n else 0.0

    def with_dist(self, dist):
        return FinitePmSpace(self.points, dist, self.mass, self.mass_rational, self.coords)


def space(points, dist, mass, mass_rational=None, coords=None):
    """Build a space and reject it if any invariant fails."""
    sp = FinitePmSpace(points, dist, mass, mass_rational, coords)
    check_valid(sp)
    return sp


def validate(sp: FinitePmSpace):
    """Return the first violated invariant of ``sp`` or None.  Total function."""
    n = sp.n
    if n == 0:
        return Violation("empty", (), "space has no support points")
    D, m = sp.dist, sp.mass
    if D.shape != (n, n):
        return Violation("shape", D.shape, f"dist must be {n}x{n}, got {D.shape}")
    if m.shape != (n,):
        return Violation("shape", m.shape, f"mass must have length {n}")
    if not np.all(np.isfinite(D)):
        i, j = np.argwhere(~np.isfinite(D))[0]
        return Violation("finite", (int(i), int(j)), f"dist[{i}][{j}] is not finite")
    bad = np.argwhere(np.abs(np.diag(D)) > VALIDATION_TOL)
    if bad.size:
        i = int(bad[0][0])
        return Violation("diagonal", (i,), f"dist[{i}][{i}] = {D[i, i]} != 0")
    asym = np.abs(D - D.T)
    if asym.max() > VALIDATION_TOL:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        return Violation("symmetry", (int(i), int(j)), f"dist[{i}][{j}] != dist[{j}][{i}]")
    if n > 1:
        off = D + np.diag([np.inf] * n)
        if off.min() <= 0:
            i, j = np.unravel_index(int(np.argmin(off)), off.shape)
            return Violation(
                "positivity", (int(i), int(j)), f"dist[{i}][{j}] = {D[i, j]} <= 0 for i != j"
            )
    tri = _triangle_violation(D)
    if tri is not None:
        i, j, k = tri
        return Violation(
            "triangle",
            tri,
            f"dist[{i}][{k}] > dist[{i}][{j}] + dist[{j}][{k}] by "
            f"{D[i, k] - D[i, j] - D[j, k]:.3e}",
        )
    if np.any(m <= 0):
        i = int(np.argmin(m))
        return Violation("mass_positive", (i,), f"mass[{i}] = {m[i]} <= 0 (support-only storage)")
    s = float(m.sum())
    if abs(s - 1.0) > VALIDATION_TOL:
        return Violation("mass_sum", (), f"sum(mass) = {s!r} != 1")
    if sp.mass_rational is not None:
        if len(sp.mass_rational) != n:
            return Violation("mass_rational", (), "mass_rational length mismatch")
        if sum(sp.mass_rational) != 1:
            return Violation("mass_rational", (), "mass_rational does not sum to 1")
        for i, r in enumerate(sp.mass_rational):
            if abs(float(r) - m[i]) > 1e-9:
                return Violation("mass_rational", (i,), f"mass_rational[{i}] != mass[{i}]")
    return None


def _triangle_violation(D):
    n = D.shape[0]
    if n <= 2:
        return None
    if n <= _TRIANGLE_BLOCK_LIMIT:
        gap = D[:, None, :] - D[:, :, None] - D[None, :, :]
        if gap.max() <= VALIDATION_TOL:
            return None
        i, j, k = np.unravel_index(int(np.argmax(gap)), gap.shape)
        return int(i), int(j), int(k)
    for j in range(n):
        gap = D - (D[:, j][:, None] + D[j][None, :])
        if gap.max() > VALIDATION_TOL:
            i, k = np.unravel_index(int(np.argmax(gap)), gap.shape)
            return int(i), j, int(k)
    return None


def check_valid(sp: FinitePmSpace):
    v = validate(sp)
    if v is not None:
        raise InvalidSpaceError(str(v))
    return sp


@dataclass(frozen=True, eq=False)
class LipschitzFunction:
    """Real values on a space's support together with a certified Lipschitz bound."""

    values: np.ndarray
    lip_bound: float

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.lip_bound < 0:
            raise InputError("lip_bound must be >= 0")


def lipschitz_constant(sp: FinitePmSpace, values):
    """Smallest L with |f_i - f_j| <= L d_ij; 0 on a one-point space."""
    f = np.asarray(values, dtype=float)
    if sp.n <= 1:
        return 0.0
    diff = np.abs(f[:, None] - f[None, :])
    off = ~np.eye(sp.n, dtype=bool)
    return float((diff[off] / sp.dist[off]).max())


def as_lipschitz(sp: FinitePmSpace, values, lip_bound=None):
    """Wrap values into a LipschitzFunction, certifying the bound."""
    L = lipschitz_constant(sp, values)
    if lip_bound is None:
        lip_bound = L
    elif L > lip_bound + REAL_TOL:
        raise InputError(f"values have Lipschitz constant {L} > certified bound {lip_bound}")
    return LipschitzFunction(values, float(lip_bound))


@dataclass(frozen=True, eq=False)
class Coupling:
    """Joint nonnegative mass matrix between two spaces (rows X, columns Y)."""

    joint: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "joint", _freeze(self.joint))

    def check_margins(self, mass_x, mass_y, tol=VALIDATION_TOL):
        if np.abs(self.joint.sum(axis=1) - mass_x).max() > tol:
            raise InputError("coupling row sums do not match the first marginal")
        if np.abs(self.joint.sum(axis=0) - mass_y).max() > tol:
            raise InputError("coupling column sums do not match the second marginal")
        return self


# ---------------------------------------------------------------------------
# basic operations


def scale(sp: FinitePmSpace, t):
    """Metric scale change: multiply all distances by t > 0, masses unchanged."""
    if not t > 0:
        raise InputError(f"scale factor must be positive, got {t}")
    return sp.with_dist(sp.dist * float(t))


def _combine_lp(a, b, p):
    if p == math.inf:
        return np.maximum(a, b)
    if p == 1:
        return a + b
    return (a**p + b**p) ** (1.0 / p)


def product(sx: FinitePmSpace, sy: FinitePmSpace, p):
    """l_p product: Cartesian points, l_p-combined distances, tensor masses."""
    if p < 1:
        raise InputError(f"product exponent must satisfy p >= 1, got {p}")
    pts = tuple((a, b) for a in sx.points for b in sy.points)
    dx = np.repeat(np.repeat(sx.dist, sy.n, axis=0), sy.n, axis=1)
    dy = np.tile(sy.dist, (sx.n, sx.n))
    D = _combine_lp(dx, dy, p)
    m = np.outer(sx.mass, sy.mass).ravel()
    mr = None
    if sx.mass_rational is not None and sy.mass_rational is not None:
        mr = tuple(a * b for a in sx.mass_rational for b in sy.mass_rational)
    return FinitePmSpace(pts, D, m, mr)


def mm_isomorphic(sx: FinitePmSpace, sy: FinitePmSpace, tol=REAL_TOL, max_points=10):
    """Decide mm-isomorphism by searching mass-compatible support bijections.

    Exact up to ``tol`` on masses and distances; intended for n <= 10.
    """
    if sx.n > max_points or sy.n > max_points:
        raise SizeLimitError(f"mm_isomorphic is limited to {max_points} points")
    n = sx.n
    if n != sy.n:
        return False
    if abs(sx.diam() - sy.diam()) > tol:
        return False
    # Candidate targets must match mass and the multiset of incident distances.
    def profile(sp, i):
        return (sp.mass[i], np.sort(sp.dist[i]))

    cand = []
    for i in range(n):
        mi, di = profile(sx, i)
        row = [
            j
            for j in range(n)
            if abs(sy.mass[j] - mi) <= tol and np.max(np.abs(np.sort(sy.dist[j]) - di)) <= tol
        ]
        if not row:
            return False
        cand.append(row)

    used = [False] * n
    assign = [-1] * n
    order = sorted(range(n), key=lambda i: len(cand[i]))

    def rec(k):
        if k == n:
            return True
        i = order[k]
        for j in cand[i]:
            if used[j]:
                continue
            ok = True
            for kk in range(k):
                i2 = order[kk]
                if abs(sx.dist[i, i2] - sy.dist[j, assign[i2]]) > tol:
                    ok = False
                    break
            if ok:
                used[j] = True
                assign[i] = j
                if rec(k + 1):
                    return True
                used[j] = False
                assign[i] = -1
        return False

    return rec(0)


def total_variation(mass_a, mass_b):
    """Half-sum total variation between probability vectors on a common space."""
    a = np.asarray(mass_a, dtype=float)
    b = np.asarray(mass_b, dtype=float)
    if a.shape != b.shape:
        raise InputError("total_variation requires vectors of the same length")
    return 0.5 * float(np.abs(a - b).sum())


def prokhorov(sp: FinitePmSpace, mass_a, mass_b, max_points=20):
    """Exact Prokhorov distance between two probability vectors on ``sp``.

    The feasibility condition b(A) <= a(closed eps-ball of A) + eps is checked
    against all 2^n subsets A; the ball pattern is constant between consecutive
    pairwise distances, so the infimum lies on a finite candidate set.
    """
    n = sp.n
    if n > max_points:
        raise SizeLimitError(f"prokhorov subset enumeration is limited to {max_points} points")
    a = np.asarray(mass_a, dtype=float)
    b = np.asarray(mass_b, dtype=float)
    if a.shape != (n,) or b.shape != (n,):
        raise InputError("mass vectors must match the space")

    amass = _subset_sums(a)
    bmass = _subset_sums(b)
    thresholds = np.unique(np.concatenate(([0.0], sp.dist.ravel())))

    for idx, t in enumerate(thresholds):
        nxt = thresholds[idx + 1] if idx + 1 < len(thresholds) else math.inf
        # ball bitmasks at radius t (closed balls)
        within = sp.dist <= t + VALIDATION_TOL
        balls = [int(sum(1 << j for j in range(n) if within[i, j])) for i in range(n)]
        union = _subset_union(balls, n)
        gap = float(np.max(bmass - amass[union]))
        cand = max(t, gap)
        if cand < nxt:
            return max(0.0, min(1.0, cand))
    return 1.0  # unreachable: the last interval always yields a candidate


def _subset_sums(w):
    n = len(w)
    out = np.zeros(1 << n)
    for i in range(n):
        step = 1 << i
        out = out.reshape(-1, 2 * step)
        out[:, step:] = out[:, :step] + w[i]
        out = out.ravel()
    return out


def _subset_union(masks, n):
    out = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        step = 1 << i
        out = out.reshape(-1, 2 * step)
        out[:, step:] = out[:, :step] | np.int64(masks[i])
        out = out.ravel()
    return out


def ky_fan(sp: FinitePmSpace, f: LipschitzFunction, g: LipschitzFunction):
    """Smallest eps with mass{|f - g| > eps} <= eps, by a sorted scan."""
    d = np.abs(f.values - g.values)
    if d.shape != (sp.n,):
        raise InputError("functions must live on the given space")
    thresholds = np.unique(np.concatenate(([0.0], d)))
    for idx, t in enumerate(thresholds):
        nxt = thresholds[idx + 1] if idx + 1 < len(thresholds) else math.inf
        exceed = float(sp.mass[d > t + VALIDATION_TOL].sum())
        cand = max(t, exceed)
        if cand < nxt or nxt is math.inf:
            return cand
    return 1.0


def entropy(sp: FinitePmSpace, f):
    """Relative entropy functional sum(f log f dm) - (sum f dm) log(sum f dm).

    Nonnegative by Jensen; 0 log 0 is read as 0.  Rejects negative entries.
    """
    v = np.asarray(f, dtype=float)
    if np.any(v < 0):
        raise InputError("entropy requires nonnegative values")
    return entropy_weighted(sp.mass, v)


def entropy_weighted(weights, v):
    w = np.asarray(weights, dtype=float)
    v = np.asarray(v, dtype=float)
    pos = v > 0
    s1 = float(np.sum(w[pos] * v[pos] * np.log(v[pos])))
    mean = float(np.sum(w * v))
    s2 = mean * math.log(mean) if mean > 0 else 0.0
    return s1 - s2


def mcshane_extend(sp: FinitePmSpace, subset, f_values, lip_bound):
    """Extend an L-Lipschitz function from a subset of support indices to all of
    the space via x -> min over y of f(y) + L d(x, y)."""
    subset = list(subset)
    if not subset:
        raise InputError("mcshane_extend needs a non-empty subset")
    fv = np.asarray(f_values, dtype=float)
    if fv.shape != (len(subset),):
        raise InputError("f_values must match the subset length")
    L = float(lip_bound)
    for a, b in itertools.combinations(range(len(subset)), 2):
        if abs(fv[a] - fv[b]) > L * sp.dist[subset[a], subset[b]] + REAL_TOL:
            raise InputError("input is not L-Lipschitz on the subset")
    ext = np.min(fv[None, :] + L * sp.dist[:, subset], axis=1)
    return LipschitzFunction(ext, L)


# ---------------------------------------------------------------------------
# JSON space format: {"points": [str], "dist": [[num]], "mass": [num]}
# with optional "mass_rational": ["p/q", ...] and "coords": [[num], ...].


def to_json_dict(sp: FinitePmSpace):
    d = {
        "points": [str(p) for p in sp.points],
        "dist": [[float(x) for x in row] for row in sp.dist],
        "mass": [float(x) for x in sp.mass],
    }
    if sp.mass_rational is not None:
        d["mass_rational"] = [f"{r.numerator}/{r.denominator}" for r in sp.mass_rational]
    if sp.coords is not None:
        d["coords"] = [[float(x) for x in row] for row in np.atleast_2d(sp.coords)]
    return d


def from_json_dict(d):
    try:
        points = d["points"]
        dist = d["dist"]
        mass = d["mass"]
    except (KeyError, TypeError) as e:
        raise InputError(f"space JSON is missing field: {e}") from e
    mr = None
    if "mass_rational" in d:
        try:
            mr = tuple(Fraction(s) for s in d["mass_rational"])
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad mass_rational entry: {e}") from e
    coords = np.asarray(d["coords"], dtype=float) if "coords" in d else None
    return space(points, dist, mass, mass_rational=mr, coords=coords)


def save_space(sp: FinitePmSpace, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(sp), fh)
        fh.write("\n")


def load_space(path):
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read space file {path}: {e}") from e
    return from_json_dict(d)
