"""Lipschitz-order domination between finite spaces.

X dominates Y when a 1-Lipschitz map pushes the mass of X exactly onto the
mass of Y.  The search is an exhaustive DFS over point assignments with
distance pruning on partial maps and per-target mass-feasibility pruning;
refusals are therefore proofs.  Masses are matched exactly with rational
arithmetic when both spaces carry rational masses, otherwise within 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    FinitePmSpace,
    InputError,
    SizeLimitError,
    VALIDATION_TOL,
    mm_isomorphic,
    product,
)

MAX_SOURCE = 12
MAX_TARGET = 8


@dataclass(frozen=True)
class DominationWitness:
    """A verified 1-Lipschitz measure-preserving assignment of support points."""

    map: tuple
    pushforward: tuple
    nodes_explored: int = 0


@dataclass(frozen=True)
class Refusal:
    """Proof object for a failed exhaustive search."""

    nodes_explored: int
    reason: str = "exhausted"

    def __bool__(self):
        return False


def check_witness(sx: FinitePmSpace, sy: FinitePmSpace, mapping, tol=VALIDATION_TOL):
    """Verify the domination conditions for an explicit map."""
    mapping = tuple(int(v) for v in mapping)
    if len(mapping) != sx.n or any(not 0 <= v < sy.n for v in mapping):
        raise InputError("mapping shape does not match the spaces")
    for i in range(sx.n):
        for j in range(i + 1, sx.n):
            if sy.dist[mapping[i], mapping[j]] > sx.dist[i, j] + tol:
                return False
    push = np.zeros(sy.n)
    for i, v in enumerate(mapping):
        push[v] += sx.mass[i]
    return bool(np.abs(push - sy.mass).max() <= max(tol, 1e-12))


def dominates(sx: FinitePmSpace, sy: FinitePmSpace, max_source=MAX_SOURCE, max_target=MAX_TARGET):
    """Search for a 1-Lipschitz measure-preserving map from X onto Y.

    Returns a DominationWitness or a Refusal (a proven negative).  Points are
    processed by decreasing mass with deterministic tie-breaking, so the
    returned witness does not depend on scheduling.
    """
    if sx.n > max_source or sy.n > max_target:
        raise SizeLimitError(
            f"dominates is limited to |X| <= {max_source}, |Y| <= {max_target}"
        )
    exact = sx.mass_rational is not None and sy.mass_rational is not None
    if exact:
        src_mass = list(sx.mass_rational)
        need = list(sy.mass_rational)
        zero = Fraction(0)
        tol = zero
    else:
        src_mass = [float(v) for v in sx.mass]
        need = [float(v) for v in sy.mass]
        tol = 1e-12

    nx, ny = sx.n, sy.n
    order = sorted(range(nx), key=lambda i: (-src_mass[i], i))
    y_order = sorted(range(ny), key=lambda j: (-need[j], j))
    dx, dy = sx.dist, sy.dist
    assign = [-1] * nx
    nodes = 0

    suffix_mass = [sum(src_mass[i] for i in order[k:]) for k in range(nx + 1)]

    def feasible_targets(k):
        i = order[k]
        out = []
        for j in y_order:
            if need[j] < src_mass[i] - tol:
                continue
            ok = True
            for kk in range(k):
                i2 = order[kk]
                if dy[j, assign[i2]] > dx[i, i2] + 1e-12:
                    ok = False
                    break
            if ok:
                out.append(j)
        return out

    def mass_prune(k):
        # every remaining target deficit must be coverable by points that can
        # still reach it under the distance constraints
        remaining = [i2 for i2 in order[k:]]
        for j in range(ny):
            if need[j] <= tol:
                continue
            cover = 0 if exact else 0.0
            for i in remaining:
                ok = True
                for kk in range(k):
                    i2 = order[kk]
                    if dy[j, assign[i2]] > dx[i, i2] + 1e-12:
                        ok = False
                        break
                if ok:
                    cover += src_mass[i]
            if cover < need[j] - tol:
                return False
        return True

    def rec(k):
        nonlocal nodes
        nodes += 1
        if k == nx:
            return all(abs(v) <= tol for v in need)
        if suffix_mass[k] < sum(v for v in need if v > tol) - (0 if exact else 1e-9):
            return False
        if not mass_prune(k):
            return False
        i = order[k]
        for j in feasible_targets(k):
            assign[i] = j
            need[j] -= src_mass[i]
            if rec(k + 1):
                return True
            need[j] += src_mass[i]
            assign[i] = -1
        return False

    if rec(0):
        push = np.zeros(ny)
        for i, v in enumerate(assign):
            push[v] += sx.mass[i]
        return DominationWitness(tuple(assign), tuple(push), nodes)
    return Refusal(nodes)


def antisymmetry_check(sx: FinitePmSpace, sy: FinitePmSpace):
    """With mutual domination established, the spaces must be mm-isomorphic."""
    w1 = dominates(sx, sy)
    w2 = dominates(sy, sx)
    if not (isinstance(w1, DominationWitness) and isinstance(w2, DominationWitness)):
        raise InputError("antisymmetry_check requires mutual domination")
    return mm_isomorphic(sx, sy)


def generator_idempotent(generators, p, skip_oversize=True):
    """A finite surrogate of closure under products: every pairwise product of
    generators must be dominated by some generator.

    Pairs whose product exceeds the exact-search size are skipped when
    ``skip_oversize`` (truncation-level semantics), otherwise raised.
    """
    generators = list(generators)
    if not generators:
        raise InputError("generator list must be non-empty")
    for ga in generators:
        for gb in generators:
            prod = product(ga, gb, p)
            if prod.n > MAX_TARGET:
                if skip_oversize:
                    continue
                raise SizeLimitError("product exceeds the domination search limit")
            if not any(
                g.n <= MAX_SOURCE and isinstance(dominates(g, prod), DominationWitness)
                for g in generators
            ):
                return False
    return True
