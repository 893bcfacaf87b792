"""Hop-distance and power-graph tests against pure-Python oracles."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoecc.errors import Disconnected
from geoecc.netgraph import (
    CommGraph,
    KnowledgeGraph,
    all_pairs_distances,
    avg_neighborhood_size,
    bfs_distances,
    diameter,
    power_graph,
)

from oracles import all_pairs_pure, bfs_pure, power_graph_pure


def random_graph(seed: int, n: int, p: float) -> CommGraph:
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return CommGraph.from_edges(n, edges)


def path_graph(n: int) -> CommGraph:
    return CommGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def test_comm_graph_basics():
    g = CommGraph.from_edges(4, [(0, 1), (1, 2), (0, 1)])
    assert g.n == 4
    assert g.edge_count() == 2
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
    assert set(g.edges()) == {(0, 1), (1, 2)}
    assert not g.is_connected()
    assert path_graph(5).is_connected()


@pytest.mark.parametrize("seed", range(20))
def test_bfs_matches_pure(seed):
    n = 5 + seed
    g = random_graph(seed, n, 0.25)
    adj = {u: list(g.adjacency[u]) for u in range(n)}
    for src in range(0, n, 3):
        assert bfs_distances(g, src) == bfs_pure(adj, src)


@pytest.mark.parametrize("seed", range(10))
def test_all_pairs_matches_pure(seed):
    n = 6 + seed
    g = random_graph(seed + 50, n, 0.3)
    adj = {u: list(g.adjacency[u]) for u in range(n)}
    d = all_pairs_distances(g)
    for u in range(n):
        row = bfs_pure(adj, u)
        for v in range(n):
            got = d[u, v]
            want = row[v]
            if want is math.inf:
                assert not np.isfinite(got)
            else:
                assert got == want


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("k", [1, 2, 3])
def test_power_graph_matches_pure(seed, k):
    n = 6 + seed
    g = random_graph(seed + 100, n, 0.25)
    adj = {u: list(g.adjacency[u]) for u in range(n)}
    assert power_graph(g, k).edge_set() == power_graph_pure(adj, k)


def test_power_graph_k1_is_base():
    g = random_graph(3, 12, 0.3)
    assert power_graph(g, 1).edge_set() == set(g.edges())


def test_power_graph_saturates_at_diameter():
    g = path_graph(6)
    assert diameter(g) == 5
    full = {(i, j) for i in range(6) for j in range(i + 1, 6)}
    assert power_graph(g, 5).edge_set() == full
    assert power_graph(g, 9).edge_set() == full


def test_knowledge_graph_consistency():
    g = random_graph(9, 14, 0.25)
    kg = KnowledgeGraph(g, 2)
    for u in range(14):
        nbrs = kg.neighbors(u)
        assert kg.degree(u) == len(nbrs)
        assert u not in nbrs
        for v in nbrs:
            assert kg.has_edge(u, v) and kg.has_edge(v, u)
    with pytest.raises(ValueError):
        KnowledgeGraph(g, 0)


def test_diameter_requires_connectivity():
    g = CommGraph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(Disconnected):
        diameter(g)


def test_avg_neighborhood_size_path3():
    g = path_graph(3)
    assert avg_neighborhood_size(g, 1) == pytest.approx(4.0 / 3.0)
    assert avg_neighborhood_size(g, 2) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        avg_neighborhood_size(g, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(4, 16), st.integers(1, 4))
def test_power_graph_monotone_in_k(seed, n, k):
    g = random_graph(seed, n, 0.3)
    assert power_graph(g, k).edge_set() <= power_graph(g, k + 1).edge_set()
