"""Exact one-step drift oracles and structural identities.

The brute-force side works on plain Python neighbour sets rebuilt from the
graph's adjacency: it enumerates every surviving triangle, removes it from a
scratch copy, recounts the observable and averages the change with exact
fractions.  The formula side reads the maintained co-degree table.  Neither
route shares code with the other.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .._bits import pair_id
from ..graph_core import DynamicGraph
from . import observables as obs
from .observables import compute_R, compute_T, edges_within_neighborhood

__all__ = [
    "neighbor_sets",
    "brute_triangles",
    "BruteDrifts",
    "brute_drifts",
    "formula_drift_Yuv",
    "formula_drift_Q",
    "formula_drift_Yu",
    "drift_oracle_Yuv",
    "drift_oracle_Q",
    "drift_oracle_Yu",
    "decomposition_identity_check",
    "r_identity_check",
    "t_identity_check",
    "weight_identity_check",
    "identity_suite",
    "NoTriangles",
    "reachable_graphs",
    "oracle_mismatches",
    "oracle_sweep",
]


class NoTriangles(ValueError):
    """Drift is undefined on a triangle-free graph."""


def neighbor_sets(g: DynamicGraph) -> list[set[int]]:
    dense = g.dense()
    return [set(map(int, dense[u].nonzero()[0])) for u in range(g.n)]


def brute_triangles(nbrs) -> list[tuple[int, int, int]]:
    out = []
    for a in range(len(nbrs)):
        for b in nbrs[a]:
            if b <= a:
                continue
            for c in nbrs[a] & nbrs[b]:
                if c > b:
                    out.append((a, b, c))
    return out


def _without(nbrs, tri):
    a, b, c = tri
    new = [set(s) for s in nbrs]
    for x, y in ((a, b), (a, c), (b, c)):
        new[x].discard(y)
        new[y].discard(x)
    return new


class BruteDrifts:
    """Expected one-step changes of ``Q``, ``Y_u`` and ``Y_{u,v}`` by enumeration."""

    def __init__(self, g: DynamicGraph):
        self.n = g.n
        self.nbrs = neighbor_sets(g)
        self.triangles = brute_triangles(self.nbrs)
        if not self.triangles:
            raise NoTriangles("graph has no triangle")
        self.outcomes = [_without(self.nbrs, t) for t in self.triangles]

    @property
    def Q(self) -> int:
        return len(self.triangles)

    def Yuv(self, u, v) -> Fraction:
        before = len(self.nbrs[u] & self.nbrs[v])
        change = sum(len(o[u] & o[v]) - before for o in self.outcomes)
        return Fraction(change, self.Q)

    def Yu(self, u) -> Fraction:
        before = len(self.nbrs[u])
        return Fraction(sum(len(o[u]) - before for o in self.outcomes), self.Q)

    def dQ(self) -> Fraction:
        change = sum(len(brute_triangles(o)) - self.Q for o in self.outcomes)
        return Fraction(change, self.Q)


def brute_drifts(g: DynamicGraph) -> BruteDrifts:
    return BruteDrifts(g)


def formula_drift_Yuv(g: DynamicGraph, u, v, Q: int) -> Fraction:
    ind = 1 if g.has_edge(u, v) else 0
    num = sum(g.codegree(u, x) + g.codegree(v, x) - ind for x in g.common_neighbors(u, v))
    return Fraction(-num, Q)


def formula_drift_Q(g: DynamicGraph, triangles) -> Fraction:
    num = sum(g.codegree(x, y) + g.codegree(x, z) + g.codegree(y, z) - 2
              for x, y, z in triangles)
    return Fraction(-num, len(triangles))


def formula_drift_Yu(g: DynamicGraph, u, Q: int) -> Fraction:
    return Fraction(-2 * compute_T(g, u), Q)


def drift_oracle_Yuv(g: DynamicGraph, u: int, v: int) -> tuple[Fraction, Fraction]:
    """(enumerated expectation, closed-form value) of the co-degree drift."""
    g._check(u, v)
    brute = BruteDrifts(g)
    return brute.Yuv(u, v), formula_drift_Yuv(g, u, v, brute.Q)


def drift_oracle_Q(g: DynamicGraph) -> tuple[Fraction, Fraction]:
    brute = BruteDrifts(g)
    return brute.dQ(), formula_drift_Q(g, brute.triangles)


def drift_oracle_Yu(g: DynamicGraph, u: int) -> tuple[Fraction, Fraction]:
    g._check(u)
    brute = BruteDrifts(g)
    return brute.Yu(u), formula_drift_Yu(g, u, brute.Q)


def decomposition_identity_check(g: DynamicGraph, u: int, v: int) -> bool:
    """Co-degree drift numerator equals ``R_uv + R_vu + Y_uv [uv in E]``."""
    ind = 1 if g.has_edge(u, v) else 0
    lhs = sum(g.codegree(u, x) + g.codegree(v, x) - ind for x in g.common_neighbors(u, v))
    rhs = compute_R(g, u, v) + compute_R(g, v, u) + g.codegree(u, v) * ind
    return lhs == rhs


def r_identity_check(g: DynamicGraph, u: int, v: int) -> bool:
    ind = 1 if g.has_edge(u, v) else 0
    return compute_R(g, u, v) == sum(g.codegree(u, x) - ind for x in g.common_neighbors(u, v))


def t_identity_check(g: DynamicGraph, u: int) -> bool:
    return 2 * edges_within_neighborhood(g, u) == sum(g.codegree(u, x) for x in g.neighbors(u))


def weight_identity_check(g: DynamicGraph, Q: int | None = None) -> bool:
    """Sum of co-degrees over edges equals three times the triangle count."""
    if Q is None:
        Q = len(brute_triangles(neighbor_sets(g)))
    return sum(g.codegree(x, y) for x, y in g.edges()) == 3 * Q


def identity_suite(g: DynamicGraph, Q: int | None = None) -> list[str]:
    """Names of failed identities over all vertices and ordered pairs (empty if all hold).

    Checks, for every pair, the decomposition of the co-degree drift numerator
    and the R-identity; for every vertex, ``2 T_u = sum of Y_ux``; and the
    edge-weight sum ``3 Q``.  ``R`` and ``T`` are counted by definition, the
    other sides come from the maintained co-degree table.
    """
    n = g.n
    us, vs = np.nonzero(~np.eye(n, dtype=bool))
    r_def = obs.r_pairs_definition(g, us, vs)
    r_cd = obs.r_pairs(g, us, vs)
    R = np.zeros((n, n), dtype=np.int64)
    R[us, vs] = r_def
    failures = [f"R-identity({u},{v})" for u, v, a, b in zip(us, vs, r_def, r_cd) if a != b]

    iu, iv = np.triu_indices(n, 1)
    lhs = obs.drift_numerators(g, iu, iv)
    dense = g.dense()
    cd = np.array([g.cd[pair_id(u, v)] for u, v in zip(iu, iv)], dtype=np.int64)
    rhs = R[iu, iv] + R[iv, iu] + cd * dense[iu, iv]
    failures += [f"decomposition({u},{v})" for u, v, a, b in zip(iu, iv, lhs, rhs) if a != b]

    t_def = obs.t_all_definition(g)
    failures += [f"T-identity({u})" for u in range(n)
                 if sum(g.codegree(u, x) for x in g.neighbors(u)) != 2 * t_def[u]]

    if Q is None:
        a = dense.astype(np.int64)
        Q = int(np.trace(a @ a @ a)) // 6
    if int(g.cd[g.present.astype(bool)].astype(np.int64).sum()) != 3 * Q:
        failures.append("edge-weight-sum")
    return failures


def reachable_graphs(n: int, depth: int):
    """Yield ``(steps, graph)`` for every distinct graph reachable from ``K_n`` in at most ``depth`` removals.

    Children are produced by applying each triangle removal to a copy of the
    parent, so the maintained co-degree tables along every path are what get
    checked.  Graphs are deduplicated by edge set.
    """
    from ..graph_core import new_complete

    frontier = [new_complete(n)]
    seen = {frontier[0].present.tobytes()}
    for d in range(depth + 1):
        nxt = []
        for g in frontier:
            yield d, g
            if d == depth:
                continue
            for a, b, c in brute_triangles(neighbor_sets(g)):
                child = g.copy()
                child.remove_edge(a, b)
                child.remove_edge(a, c)
                child.remove_edge(b, c)
                key = child.present.tobytes()
                if key not in seen:
                    seen.add(key)
                    nxt.append(child)
        frontier = nxt


def oracle_mismatches(g: DynamicGraph) -> list[str]:
    """Every drift oracle and identity on ``g``; names of the failures."""
    out = identity_suite(g)
    try:
        brute = BruteDrifts(g)
    except NoTriangles:
        return out
    Q = brute.Q
    if brute.dQ() != formula_drift_Q(g, brute.triangles):
        out.append("drift-Q")
    for u in range(g.n):
        if brute.Yu(u) != formula_drift_Yu(g, u, Q):
            out.append(f"drift-Yu({u})")
        for v in range(u + 1, g.n):
            if brute.Yuv(u, v) != formula_drift_Yuv(g, u, v, Q):
                out.append(f"drift-Yuv({u},{v})")
    return out


def oracle_sweep(max_n: int, depth: int, min_n: int = 4) -> tuple[int, list[str]]:
    """Run :func:`oracle_mismatches` over all graphs within ``depth`` steps of ``K_n``, ``min_n <= n <= max_n``.

    Returns ``(graphs checked, failure descriptions)``.
    """
    checked = 0
    failures = []
    for n in range(min_n, max_n + 1):
        for d, g in reachable_graphs(n, depth):
            checked += 1
            failures += [f"n={n} depth={d}: {m}" for m in oracle_mismatches(g)]
    return checked, failures
