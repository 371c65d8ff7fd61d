"""Concentration invariants of finite spaces: partial diameter, observable
diameter, separation distance with general (possibly negative, implicitly
zero-tailed) threshold sequences, and the variance family.

Exact modes are reserved for small supports.  The observable diameter is
computed exactly by maximising, over each value ordering, the smallest
admissible-window width with a linear program; variance-type functionals are
convex in the observable, so their exact mode enumerates the vertices of the
1-Lipschitz polytope.  Heuristic modes run seeded multi-start coordinate
ascent and always return feasible (hence lower) values.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.special import erf

from .core import (
    FinitePmSpace,
    InputError,
    SizeLimitError,
    REAL_TOL,
    VALIDATION_TOL,
)

EXACT_MAX_POINTS = 6


# ---------------------------------------------------------------------------
# kappa sequences


@dataclass(frozen=True)
class KappaSequence:
    """Finite stored prefix of a real sequence with an implicit zero tail."""

    entries: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(float(k) for k in self.entries))

    def __getitem__(self, i):
        return self.entries[i] if 0 <= i < len(self.entries) else 0.0

    def positive(self):
        return tuple(k for k in self.entries if k > 0)

    def shuffled(self, perm):
        return KappaSequence(tuple(self.entries[p] for p in perm))

    def minus(self, eps):
        return KappaSequence(tuple(k - eps for k in self.entries))


def interleave(kappa: KappaSequence, lam: KappaSequence):
    """Merge two sequences into one; the order is irrelevant for separation."""
    return KappaSequence(kappa.entries + lam.entries)


def _as_kappa(kappa):
    if isinstance(kappa, KappaSequence):
        return kappa
    if isinstance(kappa, (int, float)):
        return KappaSequence((float(kappa),))
    return KappaSequence(tuple(kappa))


# ---------------------------------------------------------------------------
# partial diameter


def partial_diameter(values, masses, kappa):
    """Smallest diameter of a value set carrying mass >= 1 - kappa.

    Exact: sort the values and slide a two-pointer window; an optimal set can
    always be taken as a contiguous run of sorted support values.
    """
    need = 1.0 - float(kappa)
    if need <= VALIDATION_TOL:
        return 0.0
    v = np.asarray(values, dtype=float)
    w = np.asarray(masses, dtype=float)
    if v.shape != w.shape:
        raise InputError("values and masses must have the same length")
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    csum = np.concatenate(([0.0], np.cumsum(w)))
    best = math.inf
    j = 0
    for i in range(len(v)):
        if j < i:
            j = i
        while j < len(v) and csum[j + 1] - csum[i] < need - VALIDATION_TOL:
            j += 1
        if j >= len(v):
            break
        best = min(best, v[j] - v[i])
    return float(best) if best < math.inf else float(v[-1] - v[0])


def obs_diam_projection_estimate(sp: FinitePmSpace, kappa, projections=None):
    """Lower estimate of the observable diameter from coordinate projections.

    Projections are 1-Lipschitz for Euclidean sample spaces; the estimate is
    the largest partial diameter among them.  Certificate: estimate.
    """
    if projections is None:
        if sp.coords is None:
            raise InputError("space carries no coordinates; pass projections explicitly")
        projections = np.atleast_2d(sp.coords).reshape(sp.n, -1).T
    best = 0.0
    for proj in projections:
        best = max(best, partial_diameter(proj, sp.mass, kappa))
    return best


# ---------------------------------------------------------------------------
# observable diameter


def _minimal_windows(masses_sorted, need):
    """Index pairs (l, r) of inclusion-minimal contiguous windows with mass >= need."""
    n = len(masses_sorted)
    csum = np.concatenate(([0.0], np.cumsum(masses_sorted)))
    out = []
    j = 0
    for i in range(n):
        if j < i:
            j = i
        while j < n and csum[j + 1] - csum[i] < need - VALIDATION_TOL:
            j += 1
        if j >= n:
            break
        if out and out[-1][1] == j:
            out[-1] = (i, j)  # same right end, larger left end: strictly smaller window
        else:
            out.append((i, j))
    return out


def obs_diam(sp: FinitePmSpace, kappa, mode="exact", starts=64, seed=0):
    """Observable diameter sup over 1-Lipschitz f of the partial diameter of f.

    Exact mode (n <= 6): for every ordering pi of the support, the partial
    diameter is the minimum of the linear widths of admissible windows, so the
    supremum over the order region is a linear program; the result is the
    maximum over orderings.  Heuristic mode: seeded multi-start coordinate
    ascent from distance anchors; always a valid lower value.
    """
    kappa = float(kappa)
    if sp.n == 1 or 1.0 - kappa <= VALIDATION_TOL:
        return 0.0
    if mode == "exact":
        if sp.n > EXACT_MAX_POINTS:
            raise SizeLimitError(f"exact obs_diam is limited to {EXACT_MAX_POINTS} points")
        return _obs_diam_exact(sp, kappa)
    if mode == "heuristic":
        return _obs_diam_heuristic(sp, kappa, starts, seed)
    raise InputError(f"unknown mode {mode!r}")


def _obs_diam_exact(sp, kappa):
    n = sp.n
    D = sp.dist
    need = 1.0 - kappa
    best = 0.0
    # Variables: f_0..f_{n-1}, t.  Maximise t subject to
    #   t <= f[pi[r]] - f[pi[l]] for each minimal admissible window,
    #   ordering constraints, Lipschitz constraints, f[pi[0]] = 0.
    for pi in itertools.permutations(range(n)):
        if pi[0] > pi[-1]:
            continue  # f -> -f maps this ordering onto its reversal
        wins = _minimal_windows(sp.mass[list(pi)], need)
        if not wins:
            continue
        A_ub, b_ub = [], []
        tcol = n
        for l, r in wins:
            row = [0.0] * (n + 1)
            row[tcol] = 1.0
            row[pi[r]] -= 1.0
            row[pi[l]] += 1.0
            A_ub.append(row)
            b_ub.append(0.0)
        for k in range(n - 1):
            row = [0.0] * (n + 1)
            row[pi[k]] = 1.0
            row[pi[k + 1]] = -1.0
            A_ub.append(row)
            b_ub.append(0.0)
        for i in range(n):
            for j in range(i + 1, n):
                for si, sj in ((i, j), (j, i)):
                    row = [0.0] * (n + 1)
                    row[si] = 1.0
                    row[sj] = -1.0
                    A_ub.append(row)
                    b_ub.append(D[i, j])
        c = [0.0] * n + [-1.0]
        bounds = [(None, None)] * n + [(0.0, None)]
        A_eq = [[0.0] * (n + 1)]
        A_eq[0][pi[0]] = 1.0
        res = linprog(
            c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[0.0], bounds=bounds, method="highs"
        )
        if res.status == 0:
            best = max(best, -res.fun)
    return best


def _lip_interval(D, f, i):
    """Feasible range for f[i] with the other coordinates fixed."""
    lo = f - D[i]
    hi = f + D[i]
    lo[i], hi[i] = -math.inf, math.inf
    return float(lo.max()), float(hi.min())


def _anchor_starts(sp, rng, starts):
    n = sp.n
    pool = []
    for i in range(n):
        if len(pool) >= starts:
            return pool
        pool.append(sp.dist[i].copy())
    for i in range(n):
        if len(pool) >= starts:
            return pool
        pool.append(-sp.dist[i])
    while len(pool) < starts:
        # random Lipschitz function: min-extension of random anchor values
        k = int(rng.integers(1, min(n, 8) + 1))
        idx = rng.choice(n, size=k, replace=False)
        vals = rng.uniform(-sp.diam(), sp.diam(), size=k)
        pool.append(np.min(vals[None, :] + sp.dist[:, idx], axis=1))
    return pool


def _effort_budget(n, starts):
    """Multi-start budgets that keep the quadratic sweeps tractable: beyond a
    few hundred points the start count shrinks so a call stays near the cost
    of the reference 64-start search on 256 points."""
    if n <= 256:
        return starts, 200
    scale = max(1, (n * n) // (256 * 256))
    return max(2, starts // scale), max(8, 200 // scale)


def _obs_diam_heuristic(sp, kappa, starts, seed):
    rng = np.random.default_rng(seed)
    n, D = sp.n, sp.dist
    starts, _ = _effort_budget(n, starts)
    best = 0.0
    for f0 in _anchor_starts(sp, rng, starts):
        f = f0.copy()
        cur = partial_diameter(f, sp.mass, kappa)
        for _ in range(50):
            improved = False
            for i in range(n):
                lo, hi = _lip_interval(D, f, i)
                old = f[i]
                for cand in (lo, hi):
                    f[i] = cand
                    val = partial_diameter(f, sp.mass, kappa)
                    if val > cur + 1e-13:
                        cur = val
                        old = cand
                        improved = True
                f[i] = old
            if not improved:
                break
        best = max(best, cur)
    return best


def gaussian_obs_diam(sigma, kappa):
    """Observable diameter 2 sigma PsiInv((1-kappa)/2) of a Gaussian observable,
    where Psi(t) is the centred normal integral on [0, t]; inverse by bisection."""
    if not sigma > 0:
        raise InputError("sigma must be positive")
    kappa = float(kappa)
    if not 0.0 < kappa < 1.0:
        raise InputError("kappa must lie in (0, 1)")
    return 2.0 * sigma * _psi_inv((1.0 - kappa) / 2.0)


def _psi(t):
    return 0.5 * erf(t / math.sqrt(2.0))


def _psi_inv(y, tol=1e-12):
    if y <= 0.0:
        return 0.0
    if y >= 0.5:
        raise InputError("Psi inverse needs an argument in [0, 1/2)")
    lo, hi = 0.0, 1.0
    while _psi(hi) < y:
        hi *= 2.0
        if hi > 1e3:
            raise InputError("Psi inverse argument too close to 1/2")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _psi(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gaussian_vs_uniform_crossover(sigma, slack_tol=1e-3):
    """Find kappa in (0,1) where the Gaussian observable diameter drops below
    the uniform one, i.e. 2 sigma PsiInv((1-kappa)/2) < 1 - kappa.

    Returns (kappa, slack) maximising the gap via bisection for the sign
    change followed by a ternary-search refinement.  Only exists when
    sigma < 1/sqrt(2 pi).
    """
    if not 0 < sigma:
        raise InputError("sigma must be positive")

    def gap(k):
        return (1.0 - k) - gaussian_obs_diam(sigma, k)

    lo, hi = 1e-9, 1.0 - 1e-9
    if gap(hi) <= 0 and gap(0.5) <= 0:
        # scan for any positive gap
        ks = np.linspace(1e-6, 1 - 1e-6, 4097)
        vals = [gap(k) for k in ks]
        i = int(np.argmax(vals))
        if vals[i] <= 0:
            raise InputError(f"no crossover: sigma={sigma} >= 1/sqrt(2 pi)")
        lo, hi = ks[max(0, i - 1)], ks[min(len(ks) - 1, i + 1)]
    else:
        # gap is negative near 0 and positive somewhere; bisect for the root
        a, b = lo, hi
        if gap(b) <= 0:
            b = 0.5
        while gap(a) > 0:
            a /= 2
        for _ in range(200):
            mid = 0.5 * (a + b)
            if gap(mid) > 0:
                b = mid
            else:
                a = mid
        lo, hi = b, 1.0 - 1e-12
    for _ in range(200):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if gap(m1) < gap(m2):
            lo = m1
        else:
            hi = m2
    k = 0.5 * (lo + hi)
    g = gap(k)
    if g < slack_tol:
        raise InputError(f"crossover slack {g} below {slack_tol}")
    return k, g


# ---------------------------------------------------------------------------
# separation distance


@dataclass(frozen=True)
class SeparationConfig:
    """Witness for a separation value: threshold and component-to-bin groups."""

    threshold: float
    groups: tuple = ()


def separation(sp: FinitePmSpace, kappa, max_positive=12, max_points=20):
    """Exact separation distance for a general threshold sequence.

    Nonpositive entries are dropped (their sets may be empty and empty sets
    are infinitely far).  With at most one positive entry the value is
    infinite.  Otherwise candidate thresholds are the pairwise distances,
    scanned downward; feasibility at a threshold assigns every point to one
    bin or to none, where pairs closer than the threshold may not straddle
    two distinct bins.  Discarding points is essential: a bin need not be a
    union of connected components of the sub-threshold graph.
    """
    kappa = _as_kappa(kappa)
    pos = sorted(kappa.positive(), reverse=True)
    if len(pos) > max_positive:
        raise SizeLimitError(f"separation is limited to {max_positive} positive entries")
    if len(pos) <= 1:
        if pos and pos[0] > 1.0 + VALIDATION_TOL:
            return 0.0  # no admissible family at all
        return math.inf
    if sum(pos) > 1.0 + VALIDATION_TOL:
        return 0.0
    n = sp.n
    if n > max_points:
        raise SizeLimitError(f"separation is limited to {max_points} points")
    cands = np.unique(sp.dist[np.triu_indices(n, 1)]) if n > 1 else np.array([])
    for delta in cands[::-1]:
        if _separation_feasible(sp, pos, float(delta)):
            return float(delta)
    return 0.0


def separation_witness(sp: FinitePmSpace, kappa):
    """Separation value together with a witnessing configuration (threshold
    plus the point groups realising each positive requirement)."""
    val = separation(sp, kappa)
    pos = sorted(_as_kappa(kappa).positive(), reverse=True)
    if math.isinf(val):
        return val, SeparationConfig(val, (tuple(range(sp.n)),) if pos else ())
    if val <= 0.0:
        return val, SeparationConfig(0.0, ())
    groups = _separation_feasible(sp, pos, val, want_members=True)
    return val, SeparationConfig(val, tuple(tuple(g) for g in groups))


def _separation_feasible(sp: FinitePmSpace, needs, delta, want_members=False):
    conflict = sp.dist < delta - VALIDATION_TOL * max(1.0, delta)
    np.fill_diagonal(conflict, False)
    if not conflict.any() and not want_members:
        return _bins_feasible(list(sp.mass), needs)
    groups = _assignment_feasible(conflict, sp.mass, needs)
    return groups if want_members else groups is not None


def _assignment_feasible(conflict, masses, needs):
    """Exact DFS: each point joins one bin or none; a conflict edge may not
    join two distinct bins.  Skipping satisfied bins and deduplicating empty
    bins with equal residual need keeps the search sound and small.  Returns
    the bin memberships on success, None on proven failure."""
    k = len(needs)
    n = len(masses)
    order = sorted(range(n), key=lambda i: (-masses[i], i))
    suffix = [0.0] * (n + 1)
    for t in range(n - 1, -1, -1):
        suffix[t] = suffix[t + 1] + masses[order[t]]
    fill = [0.0] * k
    members = [[] for _ in range(k)]
    tol = VALIDATION_TOL

    def rec(t):
        deficit = sum(max(needs[b] - fill[b], 0.0) for b in range(k))
        if deficit <= tol * (k + 1):
            return True
        if t == n or suffix[t] + tol < deficit:
            return False
        i = order[t]
        tried_empty = set()
        for b in range(k):
            if fill[b] >= needs[b] - tol:
                continue  # feeding a satisfied bin only adds constraints
            if not members[b]:
                key = round(needs[b], 15)
                if key in tried_empty:
                    continue
                tried_empty.add(key)
            if any(
                conflict[i, q] for b2 in range(k) if b2 != b for q in members[b2]
            ):
                continue
            fill[b] += masses[i]
            members[b].append(i)
            if rec(t + 1):
                return True
            members[b].pop()
            fill[b] -= masses[i]
        return rec(t + 1)  # discard the point

    return [sorted(g) for g in members] if rec(0) else None


def _component_masses(sp: FinitePmSpace, delta):
    """Masses of connected components of the graph with edges where dist < delta."""
    n = sp.n
    adj = sp.dist < delta - VALIDATION_TOL
    seen = [False] * n
    masses = []
    for s in range(n):
        if seen[s]:
            continue
        stack, acc = [s], 0.0
        seen[s] = True
        while stack:
            i = stack.pop()
            acc += sp.mass[i]
            for j in np.nonzero(adj[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        masses.append(acc)
    return sorted(masses, reverse=True)


def _bins_feasible(comp_mass, needs):
    """Can components (each used at most once) fill every bin to its need?"""
    needs = list(needs)
    comp = sorted(comp_mass, reverse=True)
    total = sum(comp)
    if total + VALIDATION_TOL < sum(needs):
        return False
    k = len(needs)
    fill = [0.0] * k

    def rec(ci, remaining):
        deficit = sum(max(needs[b] - fill[b], 0.0) for b in range(k))
        if deficit <= VALIDATION_TOL * (k + 1):
            return True
        if ci == len(comp) or remaining + VALIDATION_TOL < deficit:
            return False
        c = comp[ci]
        tried = set()
        for b in range(k):
            key = (round(needs[b], 15), round(fill[b], 15))
            if key in tried:
                continue  # identical bins: assigning to either is symmetric
            tried.add(key)
            if fill[b] >= needs[b] - VALIDATION_TOL:
                continue
            fill[b] += c
            if rec(ci + 1, remaining - c):
                fill[b] -= c
                return True
            fill[b] -= c
        # discard this component
        return rec(ci + 1, remaining - c)

    return rec(0, total)


def separation_properties_report(sp: FinitePmSpace, kappa, lam, rng=None):
    """Check shuffle invariance, monotonicity in kappa and the interleaving-sum
    inequality on one instance; returns a dict with any violations."""
    kappa, lam = _as_kappa(kappa), _as_kappa(lam)
    rng = rng or np.random.default_rng(0)
    report = {"violations": []}
    base = separation(sp, kappa)
    perm = rng.permutation(len(kappa.entries))
    shuffled = separation(sp, kappa.shuffled(perm))
    if not _close_or_both_inf(base, shuffled):
        report["violations"].append(("shuffle", base, shuffled))
    bigger = KappaSequence(tuple(k + abs(k) * 0.1 + 0.01 for k in kappa.entries))
    mono = separation(sp, bigger)
    if _gt(mono, base):
        report["violations"].append(("monotone", base, mono))
    lhs = separation(sp, interleave(kappa, lam))
    ksum = KappaSequence(
        tuple(kappa[i] + lam[i] for i in range(max(len(kappa.entries), len(lam.entries))))
    )
    rhs = separation(sp, ksum)
    if _gt(lhs, rhs):
        report["violations"].append(("interleave_sum", lhs, rhs))
    report["ok"] = not report["violations"]
    return report


def _close_or_both_inf(a, b):
    if math.isinf(a) or math.isinf(b):
        return math.isinf(a) and math.isinf(b)
    return abs(a - b) <= REAL_TOL


def _gt(a, b):
    if math.isinf(a):
        return not math.isinf(b)
    if math.isinf(b):
        return False
    return a > b + REAL_TOL


# ---------------------------------------------------------------------------
# variance family


def variance_of(sp: FinitePmSpace, values):
    """Variance of one observable over the space."""
    f = np.asarray(values, dtype=float)
    mean = float(np.dot(sp.mass, f))
    return float(np.dot(sp.mass, (f - mean) ** 2))


def p_variance(sp: FinitePmSpace, values, p):
    """p-th absolute central moment of one observable."""
    if p < 1:
        raise InputError("p must satisfy p >= 1")
    f = np.asarray(values, dtype=float)
    mean = float(np.dot(sp.mass, f))
    if p == math.inf:
        return float(np.abs(f - mean).max())
    return float(np.dot(sp.mass, np.abs(f - mean) ** p))


def lipschitz_vertices(sp: FinitePmSpace, max_points=EXACT_MAX_POINTS):
    """Vertices of {f : |f_i - f_j| <= d_ij, f_0 = 0}.

    Every vertex has a spanning tree of tight signed constraints, so all
    (tree, sign) propagations cover the vertex set; infeasible candidates are
    filtered and duplicates removed.
    """
    n = sp.n
    if n > max_points:
        raise SizeLimitError(f"vertex enumeration is limited to {max_points} points")
    D = sp.dist
    if n == 1:
        return np.zeros((1, 1))
    feas_tol = 1e-10 * max(1.0, float(D.max()))
    out = []
    seen = set()
    for edges in _spanning_trees(n):
        order = _bfs_orient(edges, n)
        for signs in itertools.product((-1.0, 1.0), repeat=n - 1):
            f = np.zeros(n)
            for (u, v), s in zip(order, signs):
                f[v] = f[u] + s * D[u, v]
            diff = np.abs(f[:, None] - f[None, :]) - D
            if diff.max() <= feas_tol:
                key = tuple(np.round(f / max(1.0, float(D.max())), 10))
                if key not in seen:
                    seen.add(key)
                    out.append(f)
    return np.array(out)


def _spanning_trees(n):
    """All labelled spanning trees on n nodes, decoded from Pruefer sequences."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for s in seq:
            degree[s] += 1
        edges = []
        avail = sorted(i for i in range(n) if degree[i] == 1)
        seq = list(seq)
        for s in seq:
            leaf = avail.pop(0)
            edges.append((leaf, s))
            degree[s] -= 1
            if degree[s] == 1:
                bisect.insort(avail, s)
        edges.append((avail[0], avail[1]))
        yield edges


def _bfs_orient(edges, n):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    order = []
    seen = [False] * n
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                order.append((u, v))
                stack.append(v)
    return order


def variance(sp: FinitePmSpace, mode="exact", starts=64, seed=0):
    """Variance invariant: sup of variance over 1-Lipschitz observables.

    The objective is convex in f, so the exact mode takes the maximum over
    polytope vertices.  The heuristic mode moves each coordinate to the better
    endpoint of its feasible interval (optimal for a convex objective).
    """
    if sp.n == 1:
        return 0.0
    if mode == "exact":
        verts = lipschitz_vertices(sp)
        return max(variance_of(sp, f) for f in verts)
    if mode == "heuristic":
        return _variance_heuristic(sp, starts, seed)
    raise InputError(f"unknown mode {mode!r}")


def _variance_heuristic(sp, starts, seed):
    rng = np.random.default_rng(seed)
    n, D, m = sp.n, sp.dist, sp.mass
    starts, sweeps = _effort_budget(n, starts)
    best = 0.0
    for f0 in _anchor_starts(sp, rng, starts):
        f = f0.copy()
        E = float(np.dot(m, f))
        Q = float(np.dot(m, f * f))
        for _ in range(sweeps):
            improved = False
            for i in range(n):
                lo, hi = _lip_interval(D, f, i)
                base_E = E - m[i] * f[i]
                base_Q = Q - m[i] * f[i] ** 2
                cur = Q - E * E
                pick, pick_val = f[i], cur
                for cand in (lo, hi):
                    E2 = base_E + m[i] * cand
                    Q2 = base_Q + m[i] * cand * cand
                    val = Q2 - E2 * E2
                    if val > pick_val + 1e-14:
                        pick, pick_val = cand, val
                if pick != f[i]:
                    f[i] = pick
                    E = base_E + m[i] * pick
                    Q = base_Q + m[i] * pick * pick
                    improved = True
            if not improved:
                break
        best = max(best, Q - E * E)
    return best


def p_deviation(sp: FinitePmSpace, p, mode="exact", starts=64, seed=0):
    """p-deviation: sup over 1-Lipschitz f of the p-th central moment^(1/p);
    for p = inf, the sup of the maximal central deviation."""
    if p != math.inf and p < 1:
        raise InputError("p must satisfy p >= 1")
    if sp.n == 1:
        return 0.0

    def objective(f):
        return p_variance(sp, f, p)

    if mode == "exact":
        verts = lipschitz_vertices(sp)
        val = max(objective(f) for f in verts)
    elif mode == "heuristic":
        val = _ascent_generic(sp, objective, starts, seed)
    else:
        raise InputError(f"unknown mode {mode!r}")
    return val ** (1.0 / p) if p != math.inf else val


def _ascent_generic(sp, objective, starts, seed):
    rng = np.random.default_rng(seed)
    n, D = sp.n, sp.dist
    starts, sweeps = _effort_budget(n, starts)
    best = 0.0
    for f0 in _anchor_starts(sp, rng, starts):
        f = f0.copy()
        cur = objective(f)
        for _ in range(min(sweeps, 100)):
            improved = False
            for i in range(n):
                lo, hi = _lip_interval(D, f, i)
                old = f[i]
                for cand in (lo, hi):
                    f[i] = cand
                    val = objective(f)
                    if val > cur + 1e-14:
                        cur, old = val, cand
                        improved = True
                f[i] = old
            if not improved:
                break
        best = max(best, cur)
    return best


def variance_diam_bound_holds(sp: FinitePmSpace, mode="exact"):
    """Variance never exceeds a quarter of the squared diameter."""
    return variance(sp, mode=mode) <= sp.diam() ** 2 / 4.0 + REAL_TOL
