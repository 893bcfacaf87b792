"""Communication-graph representation and hop-distance queries.

Thin layer over scipy.sparse.csgraph for BFS, all-pairs distances and
diameter; k-hop power graphs are materialized as a boolean reachability
matrix when it fits a memory budget and fall back to per-node bounded
BFS with caching when it does not.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import Disconnected

# Largest boolean reachability matrix the power graph will materialize.
_MATRIX_BUDGET_BYTES = 1 << 26


class CommGraph:
    """Undirected simple graph on nodes 0..n-1 with sorted adjacency."""

    def __init__(self, n: int, adjacency: list[list[int]]):
        self.n = n
        self.adjacency = adjacency

    @classmethod
    def from_edges(cls, n: int, edges) -> "CommGraph":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, [sorted(s) for s in nbrs])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u]
                if u < v]

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def has_edge(self, u: int, v: int) -> bool:
        a = self.adjacency[u]
        lo, hi = 0, len(a)
        while lo < hi:
            mid = (lo + hi) // 2
            if a[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(a) and a[lo] == v

    @cached_property
    def _csr(self) -> csr_matrix:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for u in range(self.n):
            indptr[u + 1] = indptr[u] + len(self.adjacency[u])
        indices = np.fromiter((v for a in self.adjacency for v in a),
                              dtype=np.int64, count=int(indptr[-1]))
        data = np.ones(len(indices), dtype=np.int8)
        return csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        ncomp, _ = connected_components(self._csr, directed=False)
        return ncomp == 1


def bfs_distances(g: CommGraph, source: int) -> list:
    """Hop distances from source; math.inf for unreachable nodes."""
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range")
    d = dijkstra(g._csr, directed=False, unweighted=True, indices=source)
    return [int(x) if math.isfinite(x) else math.inf for x in d]


def all_pairs_distances(g: CommGraph) -> np.ndarray:
    """Dense (n, n) float matrix of hop distances (inf when unreachable)."""
    return dijkstra(g._csr, directed=False, unweighted=True)


def diameter(g: CommGraph) -> int:
    if not g.is_connected():
        raise Disconnected("graph is not connected")
    if g.n <= 1:
        return 0
    d = all_pairs_distances(g)
    return int(d.max())


class KnowledgeGraph:
    """The k-hop power graph G^k: uv is an edge iff 1 <= dist_G(u, v) <= k."""

    def __init__(self, base: CommGraph, k: int):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.base = base
        self.k = k
        n = base.n
        self._reach: np.ndarray | None = None
        self._cache: dict[int, np.ndarray] = {}
        if n * n <= _MATRIX_BUDGET_BYTES:
            d = all_pairs_distances(base)
            reach = d <= k
            np.fill_diagonal(reach, False)
            self._reach = reach

    def _row(self, u: int) -> np.ndarray:
        if self._reach is not None:
            return self._reach[u]
        row = self._cache.get(u)
        if row is None:
            d = dijkstra(self.base._csr, directed=False, unweighted=True,
                         indices=u, limit=self.k)
            row = d <= self.k
            row[u] = False
            self._cache[u] = row
        return row

    def neighbors(self, u: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self._row(u))]

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        return bool(self._row(u)[v])

    def degree(self, u: int) -> int:
        return int(self._row(u).sum())

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(u) for u in range(self.base.n)]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(u, v) for u in range(self.base.n) for v in self.neighbors(u)
                if u < v}


def power_graph(g: CommGraph, k: int) -> KnowledgeGraph:
    return KnowledgeGraph(g, k)


def avg_neighborhood_size(g: CommGraph, i: int) -> float:
    """Mean over nodes u of |{v != u : dist(u, v) <= i}|."""
    if i < 1:
        raise ValueError("i must be >= 1")
    d = all_pairs_distances(g)
    within = (d <= i).sum(axis=1) - 1  # drop the diagonal zero
    return float(within.mean())
