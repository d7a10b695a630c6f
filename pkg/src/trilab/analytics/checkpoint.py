"""Per-checkpoint measurement of the ensemble against its envelopes."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from numba import njit

from ..graph_core import DynamicGraph
from ..triangle_index import TriangleIndex, total_triangles
from . import observables as obs
from .formulas import (KINDS, PAPER_PARAMS, ParamSet, envelope, gamma_hat, lambda_of, p_of,
                       p_star, phi, q_upper_alt, yuvw_strict_half_width)

__all__ = [
    "SamplingPlan",
    "KindStat",
    "CheckpointRecord",
    "checkpoint_snapshot",
    "make_checkpoint_hook",
    "sample_ordered_pairs",
    "sample_triples",
    "Q_ALT_BIT",
    "YUVW_STRICT_BIT",
]

# viol_mask bits 0..5 follow KINDS; the two below are informational only
Q_ALT_BIT = 6
YUVW_STRICT_BIT = 7


@dataclass(frozen=True)
class SamplingPlan:
    """Population sizes for the sampled observables (``None``: all vertices for T)."""

    pairs: int = 2000
    triples: int = 2000
    t_vertices: int | None = None


@dataclass(frozen=True)
class KindStat:
    dev: float
    population: int
    violated: bool


@dataclass
class CheckpointRecord:
    i: int
    p: float
    Q: int
    gamma_hat: float
    phi: float
    lam: float
    p_star: float
    stats: dict[str, KindStat] = field(default_factory=dict)
    q_alt_exceeded: bool = False
    yuvw_strict_exceeded: bool = False

    @property
    def viol_mask(self) -> int:
        mask = 0
        for bit, kind in enumerate(KINDS):
            if self.stats[kind].violated:
                mask |= 1 << bit
        if self.q_alt_exceeded:
            mask |= 1 << Q_ALT_BIT
        if self.yuvw_strict_exceeded:
            mask |= 1 << YUVW_STRICT_BIT
        return mask

    def dev(self, kind: str) -> float:
        return self.stats[kind].dev


@njit(cache=True)
def _unrank_triples(codes, n):
    # colex unranking: code = C(c,3) + C(b,2) + a with a < b < c
    out = np.empty((codes.shape[0], 3), dtype=np.int64)
    for k in range(codes.shape[0]):
        r = codes[k]
        c = 2
        while (c + 1) * c * (c - 1) // 6 <= r:
            c += 1
        r -= c * (c - 1) * (c - 2) // 6
        b = 1
        while (b + 1) * b // 2 <= r:
            b += 1
        r -= b * (b - 1) // 2
        out[k, 0] = r
        out[k, 1] = b
        out[k, 2] = c
    return out


def sample_ordered_pairs(n: int, k: int, rng: np.random.Generator):
    """``k`` distinct ordered pairs ``(u, v)``, ``u != v``; all of them if ``k`` covers the population."""
    total = n * (n - 1)
    codes = np.arange(total) if k >= total else np.sort(rng.choice(total, size=k, replace=False))
    u, r = np.divmod(codes, n - 1)
    v = np.where(r < u, r, r + 1)
    return u.astype(np.int64), v.astype(np.int64)


def sample_triples(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` distinct 3-subsets of ``range(n)`` as sorted rows."""
    total = comb(n, 3)
    codes = np.arange(total) if k >= total else np.sort(rng.choice(total, size=k, replace=False))
    return _unrank_triples(codes.astype(np.int64), n)


def _stat(observed, centre, width) -> KindStat:
    observed = np.asarray(observed, dtype=float)
    if observed.size == 0:
        return KindStat(dev=0.0, population=0, violated=False)
    dev = float(np.max(np.abs(observed - centre)) / width)
    return KindStat(dev=dev, population=int(observed.size), violated=dev > 1)


def checkpoint_snapshot(g: DynamicGraph, index: TriangleIndex, i: int,
                        params: ParamSet = PAPER_PARAMS, plan: SamplingPlan = SamplingPlan(),
                        rng: np.random.Generator | None = None) -> CheckpointRecord:
    """Measure every ensemble variable and its normalized deviation at step ``i``.

    Degrees and co-degrees cover the full population; ``T_u`` covers all
    vertices unless the plan caps it; ``R_{u,v}`` and ``Y_{u,v,w}`` use
    pairs/triples drawn without replacement from ``rng``, which must be a
    stream separate from the process generator.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    n = g.n
    p = p_of(i, n)
    Q = total_triangles(index)
    rec = CheckpointRecord(i=i, p=p, Q=Q, gamma_hat=gamma_hat(n, params.gamma), phi=phi(p, n),
                           lam=lambda_of(n), p_star=p_star(n, params))

    c, w = envelope("Q", p, n, params)
    rec.stats["Q"] = _stat([Q], c, w)
    rec.q_alt_exceeded = Q > q_upper_alt(p, n)

    deg = g.deg.astype(np.int64)
    c, w = envelope("Yu", p, n, params)
    rec.stats["Yu"] = _stat(deg, c, w)

    c, w = envelope("Yuv", p, n, params)
    lo, hi = int(g.cd.min()), int(g.cd.max())
    dev = max(abs(hi - c), abs(c - lo)) / w
    rec.stats["Yuv"] = KindStat(dev=dev, population=int(g.cd.size), violated=dev > 1)

    if plan.t_vertices is None or plan.t_vertices >= n:
        tv = np.arange(n, dtype=np.int64)
    else:
        tv = np.sort(rng.choice(n, size=plan.t_vertices, replace=False)).astype(np.int64)
    c, w = envelope("Tu", p, n, params, observed=deg[tv])
    rec.stats["Tu"] = _stat(obs.t_all(g, tv), c, w)

    us, vs = sample_ordered_pairs(n, plan.pairs, rng)
    yuv = g.cd[np.where(us < vs, vs * (vs - 1) // 2 + us, us * (us - 1) // 2 + vs)]
    c, w = envelope("Ruv", p, n, params, observed=(deg[us], yuv))
    rec.stats["Ruv"] = _stat(obs.r_pairs(g, us, vs), c, w)

    tri = sample_triples(n, plan.triples, rng)
    y3 = obs.triple_codegrees(g, tri[:, 0], tri[:, 1], tri[:, 2])
    c, w = envelope("Yuvw", p, n, params)
    rec.stats["Yuvw"] = _stat(y3, c, w)
    if y3.size:
        rec.yuvw_strict_exceeded = bool(np.max(np.abs(y3 - c)) > yuvw_strict_half_width(p, n))
    return rec


def make_checkpoint_hook(params: ParamSet = PAPER_PARAMS, plan: SamplingPlan = SamplingPlan(),
                         rng: np.random.Generator | None = None, extra=None):
    """Hook for :func:`trilab.process_engine.run_to_completion` producing records.

    ``extra(state, record)`` is called after each snapshot, for additional
    checks that need the live (read-only) graph.
    """

    def hook(state, k):
        rec = checkpoint_snapshot(state.graph, state.index, state.i, params, plan, rng)
        if extra is not None:
            extra(state, rec)
        return rec

    return hook
