"""Ensemble observables beyond degrees and co-degrees.

``R_{u,v}`` counts ordered pairs ``(x, y)`` with ``xy`` an edge, ``x`` a
common neighbour of ``u`` and ``v``, ``y`` a neighbour of ``u`` other than
``v``.  ``T_u`` counts edges inside the neighbourhood of ``u``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .._bits import pair_id, popcount, trailing_zeros
from ..graph_core import DynamicGraph

__all__ = [
    "compute_R",
    "compute_T",
    "r_from_codegrees",
    "edges_within_neighborhood",
    "t_all",
    "r_pairs",
    "r_pairs_definition",
    "drift_numerators",
    "t_all_definition",
    "triple_codegrees",
]


@njit(cache=True, inline="always")
def _has(adj, u, v):
    return (adj[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1) == np.uint64(1)


@njit(cache=True)
def _r_definition(adj, us, vs):
    out = np.empty(us.shape[0], dtype=np.int64)
    one = np.uint64(1)
    for k in range(us.shape[0]):
        u = us[k]
        v = vs[k]
        total = 0
        for w in range(adj.shape[1]):
            word = adj[u, w] & adj[v, w]
            while word:
                x = w * 64 + np.int64(trailing_zeros(word))
                for w2 in range(adj.shape[1]):
                    total += popcount(adj[x, w2] & adj[u, w2])
                if _has(adj, x, v) and _has(adj, u, v):
                    total -= 1
                word &= word - one
        out[k] = total
    return out


@njit(cache=True)
def _r_codegree(adj, cd, us, vs):
    out = np.empty(us.shape[0], dtype=np.int64)
    one = np.uint64(1)
    for k in range(us.shape[0]):
        u = us[k]
        v = vs[k]
        ind = 1 if _has(adj, u, v) else 0
        total = 0
        for w in range(adj.shape[1]):
            word = adj[u, w] & adj[v, w]
            while word:
                x = w * 64 + np.int64(trailing_zeros(word))
                total += cd[pair_id(u, x)] - ind
                word &= word - one
        out[k] = total
    return out


@njit(cache=True)
def _drift_numerator(adj, cd, us, vs):
    # sum over x in N_uv of (Y_ux + Y_vx - [uv in E])
    out = np.empty(us.shape[0], dtype=np.int64)
    one = np.uint64(1)
    for k in range(us.shape[0]):
        u = us[k]
        v = vs[k]
        ind = 1 if _has(adj, u, v) else 0
        total = 0
        for w in range(adj.shape[1]):
            word = adj[u, w] & adj[v, w]
            while word:
                x = w * 64 + np.int64(trailing_zeros(word))
                total += cd[pair_id(u, x)] + cd[pair_id(v, x)] - ind
                word &= word - one
        out[k] = total
    return out


@njit(cache=True)
def _t_codegree(adj, cd, vertices):
    out = np.empty(vertices.shape[0], dtype=np.int64)
    one = np.uint64(1)
    for k in range(vertices.shape[0]):
        u = vertices[k]
        total = 0
        for w in range(adj.shape[1]):
            word = adj[u, w]
            while word:
                x = w * 64 + np.int64(trailing_zeros(word))
                total += cd[pair_id(u, x)]
                word &= word - one
        out[k] = total // 2
    return out


@njit(cache=True)
def _t_definition(adj, u):
    one = np.uint64(1)
    total = 0
    for w in range(adj.shape[1]):
        word = adj[u, w]
        while word:
            x = w * 64 + np.int64(trailing_zeros(word))
            for w2 in range(adj.shape[1]):
                total += popcount(adj[x, w2] & adj[u, w2])
            word &= word - one
    return total // 2


@njit(cache=True)
def _triples(adj, us, vs, ws):
    out = np.empty(us.shape[0], dtype=np.int64)
    for k in range(us.shape[0]):
        c = 0
        for w in range(adj.shape[1]):
            c += popcount(adj[us[k], w] & adj[vs[k], w] & adj[ws[k], w])
        out[k] = c
    return out


def _as_index(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int64)


def compute_R(g: DynamicGraph, u: int, v: int) -> int:
    """``R_{u,v}`` counted from adjacency by its definition."""
    g._check(u, v)
    return int(_r_definition(g.adj, _as_index([u]), _as_index([v]))[0])


def r_from_codegrees(g: DynamicGraph, u: int, v: int) -> int:
    """``sum over x in N_uv of (Y_ux - [uv in E])`` from the maintained table."""
    g._check(u, v)
    return int(_r_codegree(g.adj, g.cd, _as_index([u]), _as_index([v]))[0])


def compute_T(g: DynamicGraph, u: int) -> int:
    """``T_u`` as half the sum of co-degrees ``Y_{u,x}`` over neighbours ``x``."""
    g._check(u)
    return int(_t_codegree(g.adj, g.cd, _as_index([u]))[0])


def edges_within_neighborhood(g: DynamicGraph, u: int) -> int:
    """``T_u`` counted edge by edge, independent of the co-degree table."""
    g._check(u)
    return int(_t_definition(g.adj, u))


def t_all(g: DynamicGraph, vertices=None) -> np.ndarray:
    vs = np.arange(g.n, dtype=np.int64) if vertices is None else _as_index(vertices)
    return _t_codegree(g.adj, g.cd, vs)


def r_pairs(g: DynamicGraph, us, vs) -> np.ndarray:
    return _r_codegree(g.adj, g.cd, _as_index(us), _as_index(vs))


def r_pairs_definition(g: DynamicGraph, us, vs) -> np.ndarray:
    return _r_definition(g.adj, _as_index(us), _as_index(vs))


def drift_numerators(g: DynamicGraph, us, vs) -> np.ndarray:
    return _drift_numerator(g.adj, g.cd, _as_index(us), _as_index(vs))


def t_all_definition(g: DynamicGraph) -> np.ndarray:
    return np.array([_t_definition(g.adj, u) for u in range(g.n)], dtype=np.int64)


def triple_codegrees(g: DynamicGraph, us, vs, ws) -> np.ndarray:
    return _triples(g.adj, _as_index(us), _as_index(vs), _as_index(ws))
