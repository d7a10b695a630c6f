"""Word-level helpers shared by the numba kernels.

Vertex sets are rows of ``uint64`` words; bit ``x & 63`` of word ``x >> 6``
marks membership of vertex ``x``.  Unordered pairs ``{u, v}`` with ``u < v``
map to the slot ``v * (v - 1) // 2 + u`` of a flat triangular array.
"""

import math

import numpy as np
from numba import njit, types
from numba.cpython.unsafe.numbers import trailing_zeros
from numba.extending import intrinsic

__all__ = [
    "popcount",
    "trailing_zeros",
    "pair_id",
    "pair_from_id",
    "n_pairs",
    "n_words",
    "kth_common_bit",
]


@intrinsic
def popcount(typingctx, word):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@njit(cache=True, inline="always")
def pair_id(u, v):
    if u > v:
        u, v = v, u
    return v * (v - 1) // 2 + u


@njit(cache=True)
def pair_from_id(pid):
    v = int((1.0 + math.sqrt(1.0 + 8.0 * pid)) / 2.0)
    while v * (v - 1) // 2 > pid:
        v -= 1
    while (v + 1) * v // 2 <= pid:
        v += 1
    return pid - v * (v - 1) // 2, v


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def n_words(n: int) -> int:
    return (n + 63) // 64


@njit(cache=True)
def kth_common_bit(row_a, row_b, k):
    """Index of the ``k``-th (0-based) vertex in ``row_a & row_b``, or -1."""
    for w in range(row_a.shape[0]):
        word = row_a[w] & row_b[w]
        c = np.int64(popcount(word))
        if k < c:
            while k > 0:
                word &= word - np.uint64(1)
                k -= 1
            return w * 64 + np.int64(trailing_zeros(word))
        k -= c
    return -1
