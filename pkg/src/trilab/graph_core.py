"""Dynamic graph on ``[n]`` with incrementally maintained co-degrees.

Adjacency is a row of bitset words per vertex.  The co-degree ``|N_u & N_v|``
of every unordered pair lives in a flat triangular ``int32`` table indexed by
:func:`pair_id`; the same slot index keys the sampling tree in
:mod:`trilab.triangle_index`.  Edges are only ever removed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ._bits import n_pairs, n_words, pair_id, popcount, trailing_zeros

__all__ = [
    "DynamicGraph",
    "new_complete",
    "from_edges",
    "remove_edge",
    "degree",
    "codegree",
    "triple_codegree",
    "common_neighbors",
    "recount_codegrees",
    "pair_id",
]

_EMPTY_I64 = np.zeros(0, dtype=np.int64)
_NO_TREE = np.zeros((0, 2), dtype=np.int64)


@njit(cache=True, inline="always")
def _slot_add(sums, levels, total, pid, delta):
    for lvl in range(levels.shape[0] - 1):
        sums[levels[lvl, 0] + (pid >> levels[lvl, 1])] += delta
    total[0] += delta


@njit(cache=True, inline="always")
def _run_sub(sums, levels, total, pid0, word):
    """Subtract one from slots ``pid0 + t`` for each set bit ``t`` of ``word``."""
    c = np.int64(popcount(word))
    for lvl in range(levels.shape[0] - 1):
        off = levels[lvl, 0]
        s = levels[lvl, 1]
        b0 = pid0 >> s
        b1 = (pid0 + 63) >> s
        if b0 == b1:
            sums[off + b0] -= c
        else:
            cut = np.uint64((b1 << s) - pid0)
            c0 = np.int64(popcount(word & ((np.uint64(1) << cut) - np.uint64(1))))
            sums[off + b0] -= c0
            sums[off + b1] -= c - c0
    total[0] -= c


@njit(cache=True, inline="always")
def _below(w, v):
    """Mask of the bits in word ``w`` that stand for vertices ``x < v``."""
    lo = w * 64
    if v >= lo + 64:
        return np.uint64(0xFFFFFFFFFFFFFFFF)
    if v <= lo:
        return np.uint64(0)
    return (np.uint64(1) << np.uint64(v - lo)) - np.uint64(1)


@njit(cache=True, inline="always")
def _tree_sub_common(sums, levels, total, word, w, v):
    # slots {x, v} for x in word: contiguous ids when x < v, scattered otherwise
    one = np.uint64(1)
    low = word & _below(w, v)
    if low:
        _run_sub(sums, levels, total, v * (v - 1) // 2 + w * 64, low)
    high = word & ~_below(w, v)
    while high:
        x = w * 64 + np.int64(trailing_zeros(high))
        _slot_add(sums, levels, total, x * (x - 1) // 2 + v, -1)
        high &= high - one


@njit(cache=True)
def _remove_edge_kernel(adj, deg, cd, present, ecount, sums, levels, total, a, b):
    """Delete edge ``ab`` and decrement every co-degree it contributed to.

    ``levels`` describes the sampling tree (rows of ``(offset, shift)``, last
    row holding the array length).  When it has at least two rows the tree
    is kept in step: the ``ab`` slot drops to zero and each edge ``xa``/``xb``
    with ``x`` in the common neighbourhood loses one unit.
    """
    one = np.uint64(1)
    adj[a, b >> 6] &= ~(one << np.uint64(b & 63))
    adj[b, a >> 6] &= ~(one << np.uint64(a & 63))
    deg[a] -= 1
    deg[b] -= 1
    ecount[0] -= 1
    pab = pair_id(a, b)
    present[pab] = 0
    tracked = levels.shape[0] > 1
    if tracked:
        _slot_add(sums, levels, total, pab, -np.int64(cd[pab]))
    base_a = a * (a - 1) // 2
    base_b = b * (b - 1) // 2
    for w in range(adj.shape[1]):
        wa = adj[a, w]
        wb = adj[b, w]
        _decrement_row(cd, wa, w, b, base_b)
        _decrement_row(cd, wb, w, a, base_a)
        if tracked:
            common = wa & wb
            if common:
                _tree_sub_common(sums, levels, total, common, w, a)
                _tree_sub_common(sums, levels, total, common, w, b)


@njit(cache=True, inline="always")
def _decrement_row(cd, word, w, v, base_v):
    # cd[{x, v}] -= 1 for each x in word
    one = np.uint64(1)
    lo = w * 64
    low = word & _below(w, v)
    if popcount(low) >= 24:
        start = base_v + lo
        for t in range(min(64, v - lo)):
            cd[start + t] -= np.int32((low >> np.uint64(t)) & one)
    else:
        while low:
            cd[base_v + lo + np.int64(trailing_zeros(low))] -= 1
            low &= low - one
    high = word & ~_below(w, v)
    while high:
        x = lo + np.int64(trailing_zeros(high))
        cd[x * (x - 1) // 2 + v] -= 1
        high &= high - one


@njit(cache=True)
def _recount_kernel(adj):
    n = adj.shape[0]
    out = np.zeros(n * (n - 1) // 2, dtype=np.int32)
    for v in range(1, n):
        for u in range(v):
            c = 0
            for w in range(adj.shape[1]):
                c += popcount(adj[u, w] & adj[v, w])
            out[v * (v - 1) // 2 + u] = c
    return out


@njit(cache=True)
def _present_from_adj(adj):
    n = adj.shape[0]
    out = np.zeros(n * (n - 1) // 2, dtype=np.uint8)
    for v in range(1, n):
        for u in range(v):
            if (adj[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1):
                out[v * (v - 1) // 2 + u] = 1
    return out


class DynamicGraph:
    """Undirected simple graph on ``range(n)`` supporting edge deletion.

    Attributes are numpy arrays so that the process kernels can mutate them
    in place: ``adj`` (``n x words`` bitsets), ``deg`` (degrees), ``cd``
    (triangular co-degree table), ``present`` (per-pair edge flag) and
    ``ecount`` (one-element edge counter).
    """

    __slots__ = ("n", "adj", "deg", "cd", "present", "ecount")

    def __init__(self, n, adj, deg, cd, present, ecount):
        self.n = n
        self.adj = adj
        self.deg = deg
        self.cd = cd
        self.present = present
        self.ecount = ecount

    @property
    def edge_count(self) -> int:
        return int(self.ecount[0])

    def _check(self, *vs):
        for v in vs:
            if not 0 <= v < self.n:
                raise IndexError(f"vertex {v} out of range for n={self.n}")
        if len(set(vs)) != len(vs):
            raise ValueError(f"vertices must be distinct, got {vs}")

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u, v)
        return bool(self.present[pair_id(u, v)])

    def neighbors(self, u: int) -> list[int]:
        self._check(u)
        return _bits_to_list(self.adj[u])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.neighbors(u) if u < v]

    def degree(self, u: int) -> int:
        self._check(u)
        return int(self.deg[u])

    def codegree(self, u: int, v: int) -> int:
        self._check(u, v)
        return int(self.cd[pair_id(u, v)])

    def triple_codegree(self, u: int, v: int, w: int) -> int:
        self._check(u, v, w)
        row = self.adj[u] & self.adj[v] & self.adj[w]
        return sum(int(word).bit_count() for word in row)

    def common_neighbors(self, u: int, v: int) -> list[int]:
        self._check(u, v)
        return _bits_to_list(self.adj[u] & self.adj[v])

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise ValueError(f"edge {u}-{v} is not present")
        if not self.adj.flags.writeable:
            raise ValueError("graph is read-only")
        _remove_edge_kernel(self.adj, self.deg, self.cd, self.present, self.ecount,
                            _EMPTY_I64, _NO_TREE, _EMPTY_I64, u, v)

    def dense(self) -> np.ndarray:
        """Boolean ``n x n`` adjacency matrix."""
        bits = np.unpackbits(self.adj.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n].astype(bool)

    def copy(self) -> "DynamicGraph":
        return DynamicGraph(self.n, self.adj.copy(), self.deg.copy(), self.cd.copy(),
                            self.present.copy(), self.ecount.copy())

    def set_readonly(self, flag: bool = True) -> None:
        for arr in (self.adj, self.deg, self.cd, self.present, self.ecount):
            arr.flags.writeable = not flag

    def __repr__(self):
        return f"DynamicGraph(n={self.n}, edges={self.edge_count})"


def _bits_to_list(row) -> list[int]:
    out = []
    for w, word in enumerate(row):
        word = int(word)
        while word:
            low = word & -word
            out.append(w * 64 + low.bit_length() - 1)
            word ^= low
    return out


def new_complete(n: int) -> DynamicGraph:
    """The complete graph ``K_n``."""
    if n < 3:
        raise ValueError(f"need n >= 3 for a triangle to exist, got n={n}")
    words = n_words(n)
    adj = np.zeros((n, words), dtype=np.uint64)
    full, rem = divmod(n, 64)
    adj[:, :full] = np.uint64(0xFFFFFFFFFFFFFFFF)
    if rem:
        adj[:, full] = np.uint64((1 << rem) - 1)
    idx = np.arange(n)
    adj[idx, idx >> 6] &= ~(np.uint64(1) << (idx & 63).astype(np.uint64))
    deg = np.full(n, n - 1, dtype=np.int32)
    cd = np.full(n_pairs(n), n - 2, dtype=np.int32)
    present = np.ones(n_pairs(n), dtype=np.uint8)
    ecount = np.array([n_pairs(n)], dtype=np.int64)
    return DynamicGraph(n, adj, deg, cd, present, ecount)


def from_edges(n: int, edges) -> DynamicGraph:
    """Graph on ``range(n)`` with the given edges; co-degrees counted from scratch."""
    if n < 3:
        raise ValueError(f"need n >= 3, got n={n}")
    adj = np.zeros((n, n_words(n)), dtype=np.uint64)
    for u, v in edges:
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"bad edge {(u, v)}")
        adj[u, v >> 6] |= np.uint64(1 << (v & 63))
        adj[v, u >> 6] |= np.uint64(1 << (u & 63))
    deg = np.array([sum(int(w).bit_count() for w in row) for row in adj], dtype=np.int32)
    ecount = np.array([int(deg.sum()) // 2], dtype=np.int64)
    return DynamicGraph(n, adj, deg, _recount_kernel(adj), _present_from_adj(adj), ecount)


def recount_codegrees(g: DynamicGraph) -> np.ndarray:
    """Co-degree table recomputed from adjacency alone."""
    return _recount_kernel(g.adj)


def remove_edge(g: DynamicGraph, u: int, v: int) -> None:
    g.remove_edge(u, v)


def degree(g: DynamicGraph, u: int) -> int:
    return g.degree(u)


def codegree(g: DynamicGraph, u: int, v: int) -> int:
    return g.codegree(u, v)


def triple_codegree(g: DynamicGraph, u: int, v: int, w: int) -> int:
    return g.triple_codegree(u, v, w)


def common_neighbors(g: DynamicGraph, u: int, v: int) -> list[int]:
    return g.common_neighbors(u, v)
