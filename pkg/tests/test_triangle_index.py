import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from trilab import graph_core as gc
from trilab import triangle_index as ti

from conftest import brute_triangle_count


@pytest.mark.parametrize("n,weight,q", [(3, 3, 1), (4, 12, 4), (5, 30, 10), (80, 80 * 79 * 78 // 2, 82160)])
def test_build_complete(n, weight, q):
    idx = ti.build(gc.new_complete(n))
    assert idx.total_weight == weight
    assert ti.total_triangles(idx) == q


def test_build_k4_minus_edge(k4_minus_edge):
    idx = ti.build(k4_minus_edge)
    assert ti.total_triangles(idx) == 2
    assert idx.total_weight == 6
    assert ti.slot_weight(k4_minus_edge, 0, 1) == 0


def test_star_samples_none():
    g = gc.from_edges(5, [(0, k) for k in range(1, 5)])
    idx = ti.build(g)
    assert ti.total_triangles(idx) == 0
    assert ti.sample_uniform_triangle(idx, g, np.random.default_rng(0)) is None


def test_corruption_detected():
    g = gc.new_complete(5)
    idx = ti.build(g)
    idx.total[0] += 1
    with pytest.raises(ti.IndexCorruption):
        ti.total_triangles(idx)


def test_k4_removal():
    g = gc.new_complete(4)
    idx = ti.build(g)
    ti.apply_removal(idx, g, (0, 1, 2))
    assert sorted(g.edges()) == [(0, 3), (1, 3), (2, 3)]
    assert idx.total_weight == 0
    assert ti.sample_uniform_triangle(idx, g, np.random.default_rng(1)) is None


def test_k5_removal_leaves_three():
    g = gc.new_complete(5)
    idx = ti.build(g)
    ti.apply_removal(idx, g, (1, 3, 4))
    assert ti.total_triangles(idx) == brute_triangle_count(g) == 3


def test_k3_removal_empties():
    g = gc.new_complete(3)
    idx = ti.build(g)
    ti.apply_removal(idx, g, (2, 0, 1))
    assert g.edge_count == 0 and idx.total_weight == 0


def test_removal_of_non_triangle_fails(k4_minus_edge):
    idx = ti.build(k4_minus_edge)
    with pytest.raises(ValueError):
        ti.apply_removal(idx, k4_minus_edge, (0, 1, 2))


def _run_and_check(n, seed, check_tree=True):
    g = gc.new_complete(n)
    idx = ti.build(g)
    rng = np.random.default_rng(seed)
    while True:
        q_old = ti.total_triangles(idx)
        tri = ti.sample_uniform_triangle(idx, g, rng)
        if tri is None:
            break
        a, b, c = tri
        drop = g.codegree(a, b) + g.codegree(a, c) + g.codegree(b, c) - 2
        ti.apply_removal(idx, g, tri)
        assert ti.total_triangles(idx) == q_old - drop == brute_triangle_count(g)
        if check_tree:
            fresh = ti.build(g)
            assert (fresh.sums == idx.sums).all()
    assert brute_triangle_count(g) == 0


@pytest.mark.parametrize("n", [3, 4, 5, 9, 16])
def test_conservation_full_runs(n):
    for seed in range(3):
        _run_and_check(n, seed)


@given(seed=st.integers(0, 2**40))
def test_conservation_property(seed):
    _run_and_check(12, seed, check_tree=False)


def _pvalue(g, seed, draws=100_000):
    idx = ti.build(g)
    tri = ti.sample_triangles(idx, g, np.random.default_rng(seed), draws)
    keys, counts = np.unique(tri, axis=0, return_counts=True)
    q = ti.total_triangles(idx)
    assert len(keys) == q
    return chisquare(counts).pvalue


def test_uniform_k4():
    assert _pvalue(gc.new_complete(4), 0) > 1e-3


def test_uniform_k6_minus_two_edges():
    g = gc.new_complete(6)
    g.remove_edge(0, 1)
    g.remove_edge(2, 5)
    assert _pvalue(g, 7) > 1e-3


def test_k4_minus_edge_only_two_outcomes(k4_minus_edge):
    idx = ti.build(k4_minus_edge)
    tri = ti.sample_triangles(idx, k4_minus_edge, np.random.default_rng(5), 20_000)
    keys = {tuple(t) for t in tri.tolist()}
    assert keys == {(0, 2, 3), (1, 2, 3)}


def test_sampler_large_graph_consistent():
    g = gc.new_complete(300)
    rng = np.random.default_rng(11)
    for u, v in g.edges():
        if rng.random() < 0.7:
            g.remove_edge(u, v)
    idx = ti.build(g)
    for a, b, c in ti.sample_triangles(idx, g, rng, 2000).tolist():
        assert g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)
