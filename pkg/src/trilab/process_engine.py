"""Drive the greedy triangle-removal process from ``K_n`` to a triangle-free graph.

Randomness: a run with master seed ``s`` uses ``numpy.random.SeedSequence(s)``
spawned into two children.  Child 0 drives the process (a ``PCG64``
generator), child 1 is reserved for measurement sampling at checkpoints, so
analytics never perturb the triangle sequence.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Callable, Iterator

import numpy as np
from numba import njit

from . import triangle_index as ti
from .graph_core import DynamicGraph, new_complete
from .triangle_index import TriangleIndex, _remove_triangle, _sample_kernel

__all__ = [
    "ProcessState",
    "RunSummary",
    "CheckpointGrid",
    "streams",
    "new_state",
    "step",
    "run_to_completion",
]


def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(process generator, measurement generator) for a master seed."""
    proc, meas = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(proc)), np.random.Generator(np.random.PCG64(meas))


@njit(cache=True)
def _advance(adj, deg, cd, present, ecount, sums, levels, total, rng, steps, target, last):
    """Run steps until ``steps[0] == target`` or no triangle remains.

    Returns True if the target was reached with triangles possibly left,
    False once the graph is triangle-free.
    """
    tri = np.empty(3, dtype=np.int64)
    while steps[0] < target:
        if not _sample_kernel(adj, cd, present, sums, levels, total, rng, tri):
            return False
        _remove_triangle(adj, deg, cd, present, ecount, sums, levels, total,
                         tri[0], tri[1], tri[2])
        steps[0] += 1
        last[0] = tri[0]
        last[1] = tri[1]
        last[2] = tri[2]
    return total[0] > 0


@dataclass
class ProcessState:
    graph: DynamicGraph
    index: TriangleIndex
    rng: np.random.Generator
    seed: int
    steps: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    last: np.ndarray = field(default_factory=lambda: np.full(3, -1, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def i(self) -> int:
        return int(self.steps[0])

    @property
    def p(self) -> float:
        return 1.0 - 6.0 * self.i / self.n**2

    def _advance_to(self, target: int) -> bool:
        g, idx = self.graph, self.index
        try:
            return _advance(g.adj, g.deg, g.cd, g.present, g.ecount, idx.sums, idx.levels,
                            idx.total, self.rng, self.steps, target, self.last)
        except RuntimeError as exc:
            raise ti.IndexCorruption(str(exc)) from exc


def new_state(n: int, seed: int) -> ProcessState:
    g = new_complete(n)
    rng, _ = streams(seed)
    return ProcessState(graph=g, index=ti.build(g), rng=rng, seed=seed)


def step(state: ProcessState) -> tuple[int, int, int] | None:
    """Remove one uniformly random triangle; ``None`` (state untouched) if there is none."""
    before = state.i
    state._advance_to(before + 1)
    if state.i == before:
        return None
    return tuple(sorted(int(x) for x in state.last))


@dataclass(frozen=True)
class CheckpointGrid:
    """Checkpoints whenever ``p`` first reaches ``1 - k * dp`` (k = 0, 1, ...).

    ``dp`` is held as an exact fraction so grid targets do not drift.
    """

    dp: Fraction = Fraction(1, 100)

    def __post_init__(self):
        dp = Fraction(str(self.dp)) if isinstance(self.dp, float) else Fraction(self.dp)
        if not 0 < dp < 1:
            raise ValueError(f"dp must lie in (0, 1), got {self.dp}")
        object.__setattr__(self, "dp", dp)

    def targets(self, n: int) -> Iterator[tuple[int, int]]:
        """(grid index k, first step i with p(i) <= 1 - k dp)."""
        k = 0
        while k * self.dp <= 1:
            yield k, ceil(k * self.dp * n * n / 6)
            k += 1


@dataclass
class RunSummary:
    n: int
    seed: int
    M: int
    final_edges: int
    wall_ms: float
    checkpoints: list = field(default_factory=list)


Hook = Callable[[ProcessState, int], object]


def run_to_completion(state: ProcessState, grid: CheckpointGrid | None = None,
                      hook: Hook | None = None) -> RunSummary:
    """Step until no triangle remains, calling ``hook(state, k)`` at each grid point.

    The hook sees the graph and index with their arrays frozen read-only.  A
    final call with ``k = -1`` is made at the terminal graph unless the last
    grid checkpoint already landed there.  Hook return values are collected
    in ``RunSummary.checkpoints``.
    """
    t0 = time.perf_counter()
    records = []

    def fire(k):
        state.graph.set_readonly(True)
        state.index.set_readonly(True)
        try:
            rec = hook(state, k)
        finally:
            state.graph.set_readonly(False)
            state.index.set_readonly(False)
        if rec is not None:
            records.append(rec)

    last_fired = None
    if hook is not None and grid is not None:
        for k, target in grid.targets(state.n):
            if target < state.i:
                continue
            if not state._advance_to(target):
                if state.i == target:
                    fire(k)
                    last_fired = state.i
                break
            fire(k)
            last_fired = state.i
    while state._advance_to(np.iinfo(np.int64).max):
        pass
    if hook is not None and last_fired != state.i:
        fire(-1)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    n = state.n
    return RunSummary(n=n, seed=state.seed, M=state.i, final_edges=state.graph.edge_count,
                      wall_ms=wall_ms, checkpoints=records)
