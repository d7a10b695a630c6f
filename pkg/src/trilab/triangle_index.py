"""Exact uniform triangle sampling over a shrinking graph.

Every edge slot carries weight ``Y_e`` (its co-degree) while present, so the
total weight is ``3 Q``.  Sampling draws an edge with probability
``Y_e / 3Q`` and then one of its ``Y_e`` common neighbours uniformly; a
triangle is reachable through each of its three edges, giving ``1 / Q``.

Slot weights are read straight from the graph's co-degree table.  Above the
slots sits a shallow sum tree: level 0 holds the weight of each run of 256
consecutive slots and every further level groups 128 entries of the one
below, until at most 512 entries remain on top.  A unit co-degree change
costs one increment per level (two levels up to ``n`` of about 4000), and a
draw scans the top level, at most 128 entries per inner level and 256 slots.

Draws consume the generator in a fixed order: one ``integers(0, 3Q)`` for
the edge, then one ``integers(0, Y_e)`` for the third vertex.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._bits import kth_common_bit, pair_from_id, pair_id
from .graph_core import DynamicGraph, _remove_edge_kernel

__all__ = [
    "TriangleIndex",
    "IndexCorruption",
    "build",
    "sample_uniform_triangle",
    "sample_triangles",
    "apply_removal",
    "total_triangles",
]

LEAF_BITS = 8
RADIX_BITS = 7
MAX_TOP = 512


class IndexCorruption(RuntimeError):
    """The sampling tree disagrees with the graph it indexes."""


def _tree_levels(slots: int) -> np.ndarray:
    """Rows ``(offset, shift)`` per level plus a final ``(length, 0)`` row."""
    rows = []
    offset = 0
    shift = LEAF_BITS
    while True:
        size = max(1, -(-slots // (1 << shift)))
        rows.append((offset, shift))
        offset += size
        if size <= MAX_TOP:
            break
        shift += RADIX_BITS
    rows.append((offset, 0))
    return np.array(rows, dtype=np.int64)


@njit(cache=True)
def _fill(cd, present, sums, levels, total):
    sums[:] = 0
    t = 0
    for pid in range(cd.shape[0]):
        if present[pid]:
            w = np.int64(cd[pid])
            t += w
            for lvl in range(levels.shape[0] - 1):
                sums[levels[lvl, 0] + (pid >> levels[lvl, 1])] += w
    total[0] = t


@njit(cache=True)
def _draw_slot(cd, present, sums, levels, r):
    """Slot whose cumulative-weight interval contains ``r``; -1 if inconsistent."""
    top = levels.shape[0] - 2
    lo = levels[top, 0]
    j = 0
    end = levels[top + 1, 0] - lo
    while j < end:
        w = sums[lo + j]
        if r < w:
            break
        r -= w
        j += 1
    if j == end:
        return -1
    idx = j
    for lvl in range(top - 1, -1, -1):
        lo = levels[lvl, 0]
        size = levels[lvl + 1, 0] - lo
        fan = np.int64(1) << (levels[lvl + 1, 1] - levels[lvl, 1])
        j = idx * fan
        end = min(j + fan, size)
        while j < end:
            w = sums[lo + j]
            if r < w:
                break
            r -= w
            j += 1
        if j == end:
            return -1
        idx = j
    fan = np.int64(1) << levels[0, 1]
    j = idx * fan
    end = min(j + fan, cd.shape[0])
    while j < end:
        if present[j]:
            w = np.int64(cd[j])
            if r < w:
                return j
            r -= w
        j += 1
    return -1


@njit(cache=True)
def _sample_kernel(adj, cd, present, sums, levels, total, rng, out):
    """Write one uniform triangle into ``out``; False when none remain."""
    if total[0] == 0:
        return False
    r = rng.integers(0, total[0])
    pid = _draw_slot(cd, present, sums, levels, r)
    if pid < 0:
        raise RuntimeError("sampling tree inconsistent with slot weights")
    u, v = pair_from_id(pid)
    y = np.int64(cd[pid])
    if y <= 0:
        raise RuntimeError("sampled an edge of zero weight")
    k = rng.integers(0, y)
    x = kth_common_bit(adj[u], adj[v], k)
    if x < 0:
        raise RuntimeError("co-degree table disagrees with adjacency")
    out[0] = u
    out[1] = v
    out[2] = x
    return True


@njit(cache=True)
def _sample_many(adj, cd, present, sums, levels, total, rng, size):
    res = np.empty((size, 3), dtype=np.int64)
    tri = np.empty(3, dtype=np.int64)
    for s in range(size):
        if not _sample_kernel(adj, cd, present, sums, levels, total, rng, tri):
            return res[:s]
        res[s, 0] = tri[0]
        res[s, 1] = tri[1]
        res[s, 2] = tri[2]
    return res


@njit(cache=True)
def _remove_triangle(adj, deg, cd, present, ecount, sums, levels, total, a, b, c):
    # canonical order: ascending pair ids, which for a < b < c is ab, ac, bc
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    _remove_edge_kernel(adj, deg, cd, present, ecount, sums, levels, total, a, b)
    _remove_edge_kernel(adj, deg, cd, present, ecount, sums, levels, total, a, c)
    _remove_edge_kernel(adj, deg, cd, present, ecount, sums, levels, total, b, c)


class TriangleIndex:
    """Slot-weight sum tree over all ``C(n, 2)`` pair slots of a graph."""

    __slots__ = ("sums", "levels", "total")

    def __init__(self, sums, levels, total):
        self.sums = sums
        self.levels = levels
        self.total = total

    @property
    def total_weight(self) -> int:
        return int(self.total[0])

    def copy(self) -> "TriangleIndex":
        return TriangleIndex(self.sums.copy(), self.levels, self.total.copy())

    def set_readonly(self, flag: bool = True) -> None:
        for arr in (self.sums, self.total):
            arr.flags.writeable = not flag


def build(g: DynamicGraph) -> TriangleIndex:
    levels = _tree_levels(g.cd.shape[0])
    sums = np.zeros(levels[-1, 0], dtype=np.int64)
    total = np.zeros(1, dtype=np.int64)
    _fill(g.cd, g.present, sums, levels, total)
    return TriangleIndex(sums, levels, total)


def total_triangles(index: TriangleIndex) -> int:
    q, rem = divmod(index.total_weight, 3)
    if rem:
        raise IndexCorruption(f"total weight {index.total_weight} is not a multiple of 3")
    return q


def sample_uniform_triangle(index: TriangleIndex, g: DynamicGraph,
                            rng: np.random.Generator) -> tuple[int, int, int] | None:
    """One triangle drawn uniformly from those in ``g``, or ``None`` if ``g`` has none."""
    out = np.empty(3, dtype=np.int64)
    try:
        found = _sample_kernel(g.adj, g.cd, g.present, index.sums, index.levels,
                               index.total, rng, out)
    except RuntimeError as exc:
        raise IndexCorruption(str(exc)) from exc
    if not found:
        return None
    return tuple(sorted(int(x) for x in out))


def sample_triangles(index: TriangleIndex, g: DynamicGraph, rng: np.random.Generator,
                     size: int) -> np.ndarray:
    """``size`` independent uniform draws (rows of vertex triples), without removal."""
    try:
        res = _sample_many(g.adj, g.cd, g.present, index.sums, index.levels,
                           index.total, rng, size)
    except RuntimeError as exc:
        raise IndexCorruption(str(exc)) from exc
    return np.sort(res, axis=1)


def apply_removal(index: TriangleIndex, g: DynamicGraph, triangle) -> None:
    """Remove the three edges of ``triangle`` from ``g`` and reweight the tree."""
    a, b, c = (int(x) for x in triangle)
    if not (g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)):
        raise ValueError(f"{(a, b, c)} is not a triangle of the graph")
    if not (g.adj.flags.writeable and index.sums.flags.writeable):
        raise ValueError("graph or index is read-only")
    _remove_triangle(g.adj, g.deg, g.cd, g.present, g.ecount, index.sums, index.levels,
                     index.total, a, b, c)


def slot_weight(g: DynamicGraph, u: int, v: int) -> int:
    pid = pair_id(u, v)
    return int(g.cd[pid]) if g.present[pid] else 0
