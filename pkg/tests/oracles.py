"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written from the definitions, without
reusing the library's search or shortcut logic: BFS over adjacency
lists in pure python, Delaunay edges by the empty-circumcircle
definition, and the locality metrics by testing the defining conditions
at every candidate horizon.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from geoecc.geometry import build_subdivision, cells_traversed


def bfs_pure(adjacency, src: int) -> list[float]:
    """Hop distances from src; math.inf never appears for connected graphs."""
    n = len(adjacency)
    dist = [float("inf")] * n
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if dist[v] == float("inf"):
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def all_pairs_pure(adjacency) -> list[list[float]]:
    return [bfs_pure(adjacency, s) for s in range(len(adjacency))]


def power_graph_pure(adjacency, k: int) -> set[tuple[int, int]]:
    """Edge set of the k-th power: pairs at hop distance 1..k."""
    edges = set()
    for u, row in enumerate(all_pairs_pure(adjacency)):
        for v, d in enumerate(row):
            if u < v and 1 <= d <= k:
                edges.add((u, v))
    return edges


# ---------------------------------------------------------------------------
# Delaunay edges from the empty-circumcircle definition


def _candidate_centers(pts: np.ndarray, i: int, j: int) -> np.ndarray:
    """Centers worth testing on the bisector of (i, j).

    If any circle through the pair is empty, then either the midpoint
    circle is empty or the empty interval on the bisector is bounded by
    a circumcenter with some third point exactly on the circle, so
    testing the midpoint plus every circumcenter decides the pair.
    """
    p, q = pts[i], pts[j]
    d = q - p
    others = np.delete(pts, [i, j], axis=0)
    e = others - p
    den = 2.0 * (d[0] * e[:, 1] - d[1] * e[:, 0])
    good = np.abs(den) > 1e-14
    e = e[good]
    den = den[good]
    dd = float(d @ d)
    ee = (e * e).sum(axis=1)
    cx = (e[:, 1] * dd - d[1] * ee) / den
    cy = (d[0] * ee - e[:, 0] * dd) / den
    centers = p + np.stack([cx, cy], axis=1)
    return np.vstack([[(p + q) / 2.0], centers])


def _pair_is_delaunay(pts: np.ndarray, i: int, j: int) -> bool:
    centers = _candidate_centers(pts, i, j)
    radius = np.linalg.norm(centers - pts[i], axis=1)
    dist = np.linalg.norm(centers[:, None, :] - pts[None, :, :], axis=2)
    dist[:, [i, j]] = np.inf
    slack = 1e-9 * np.maximum(radius, 1.0)
    return bool((dist.min(axis=1) >= radius - slack).any())


def brute_delaunay_edges(points) -> set[tuple[int, int]]:
    """All pairs admitting a circle through both with no point inside."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if _pair_is_delaunay(pts, i, j):
                edges.add((i, j))
    return edges


# ---------------------------------------------------------------------------
# per-horizon locality conditions from the definitions


def edge_trace_data(net):
    """Per communication edge, both-direction traces in the full diagram.

    Returns a list of (u, v, consecutive_pairs, owners) where the pairs
    and owners come from tracing the segment in both directions.
    """
    box = net.routing_box()
    pos = net.apparent_positions
    sub = build_subdivision(list(enumerate(pos)), box)
    data = []
    for u, v in net.graph.edges():
        pairs = set()
        owners = set()
        for a, b in ((u, v), (v, u)):
            flat = cells_traversed(sub, (pos[a], pos[b]))
            owners.update(flat)
            for x, y in zip(flat, flat[1:]):
                pairs.add((min(x, y), max(x, y)))
        data.append((u, v, pairs, owners))
    return data


def condition_tables(net):
    """For every k in [1, D]: does each locality condition hold?

    cond_e[k]: every adjacent-cell boundary crossed by an edge segment
    joins nodes at hop distance <= k.  cond_g[k]: every cell traversed
    by an edge segment is owned by a node within k hops of both edge
    endpoints.
    """
    dist = all_pairs_pure(net.graph.adjacency)
    diameter = int(max(max(row) for row in dist))
    data = edge_trace_data(net)
    cond_e = {}
    cond_g = {}
    for k in range(1, diameter + 1):
        ok_e = True
        ok_g = True
        for u, v, pairs, owners in data:
            for x, y in pairs:
                if dist[x][y] > k:
                    ok_e = False
            for w in owners:
                if dist[w][u] > k or dist[w][v] > k:
                    ok_g = False
        cond_e[k] = ok_e
        cond_g[k] = ok_g
    return cond_e, cond_g


def brute_ke_kg(net) -> tuple[int, int]:
    """Smallest horizons satisfying the conditions, scanned upward."""
    cond_e, cond_g = condition_tables(net)
    ks = sorted(cond_e)
    k_e = next(k for k in ks if cond_e[k])
    k_g = next(k for k in ks if cond_e[k] and cond_g[k])
    return k_e, k_g
