"""Delaunay triangulation: Qhull for bulk construction, exact repair on top.

Qhull (via scipy) is fast but works in floating point: it may drop points
that are exactly collinear with a hull edge and it breaks cocircular ties
arbitrarily.  The repair pass re-inserts dropped points and runs Lawson
flips driven by the exact incircle predicate, resolving cocircular ties
toward the lexicographically smallest diagonal, so the final triangulation
is a deterministic function of the input.
"""
from __future__ import annotations

from collections import deque

import numpy as np
from scipy.spatial import Delaunay as _QhullDelaunay

from .predicates import incircle, orient2d

GHOST = -1


class Triangulation:
    """Planar triangulation stored as a directed-edge-to-apex map.

    ``apex[(a, b)] = c`` means (a, b, c) is a counterclockwise triangle;
    the reversed key of a hull edge maps to GHOST.  Inputs whose points are
    all collinear carry no triangles; they are stored as ``chain``, the
    site indices ordered along the common line.
    """

    def __init__(self, points: np.ndarray, apex: dict[tuple[int, int], int],
                 chain: list[int] | None = None):
        self.points = points
        self.apex = apex
        self.chain = chain

    def edges(self) -> set[tuple[int, int]]:
        """Undirected edges as (low, high) index pairs."""
        if self.chain is not None:
            return {(min(a, b), max(a, b))
                    for a, b in zip(self.chain, self.chain[1:])}
        return {(a, b) for (a, b) in self.apex if a < b}

    def neighbors(self) -> dict[int, list[int]]:
        """Sorted adjacency lists over all sites (isolated sites included)."""
        out: dict[int, set[int]] = {i: set() for i in range(len(self.points))}
        for a, b in self.edges():
            out[a].add(b)
            out[b].add(a)
        return {i: sorted(s) for i, s in out.items()}

    def triangles(self) -> list[tuple[int, int, int]]:
        """Each CCW triangle once, rotated so the smallest index leads."""
        if self.chain is not None:
            return []
        return sorted((a, b, c) for (a, b), c in self.apex.items()
                      if c != GHOST and a < b and a < c)


def triangulate(points) -> Triangulation:
    """Build the canonical Delaunay triangulation of distinct points."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    n = len(pts)
    if n == 0:
        raise ValueError("cannot triangulate an empty point set")
    if n == 1:
        return Triangulation(pts, {}, chain=[0])
    chain = _collinear_chain(pts)
    if chain is not None:
        return Triangulation(pts, {}, chain=chain)

    qh = _QhullDelaunay(pts)
    apex: dict[tuple[int, int], int] = {}
    present: set[int] = set()
    for tri in qh.simplices:
        a, b, c = (int(v) for v in tri)
        s = orient2d(pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1],
                     pts[c, 0], pts[c, 1])
        assert s != 0, "Qhull emitted a degenerate simplex"
        if s < 0:
            b, c = c, b
        _add_triangle(apex, a, b, c)
        present.update((a, b, c))
    _complete_ghosts(apex)

    for p in range(n):
        if p not in present:
            _insert_point(apex, pts, p)
    _lawson(apex, pts)
    return Triangulation(pts, apex)


def _collinear_chain(pts: np.ndarray) -> list[int] | None:
    """Index chain along the common line if all points are collinear."""
    n = len(pts)
    if n == 2:
        order = sorted(range(n), key=lambda i: (pts[i, 0], pts[i, 1]))
        return order
    ax, ay = pts[0, 0], pts[0, 1]
    bx, by = pts[1, 0], pts[1, 1]
    for i in range(2, n):
        if orient2d(ax, ay, bx, by, pts[i, 0], pts[i, 1]) != 0:
            return None
    # Lexicographic order sorts points along any common line.
    return sorted(range(n), key=lambda i: (pts[i, 0], pts[i, 1]))


def _add_triangle(apex, a, b, c):
    apex[(a, b)] = c
    apex[(b, c)] = a
    apex[(c, a)] = b


def _remove_triangle(apex, a, b, c):
    del apex[(a, b)]
    del apex[(b, c)]
    del apex[(c, a)]


def _complete_ghosts(apex):
    for a, b in list(apex):
        if (b, a) not in apex:
            apex[(b, a)] = GHOST


def _triangle_keys(apex):
    return [(a, b, c) for (a, b), c in apex.items()
            if c != GHOST and a < b and a < c]


def _insert_point(apex, pts, p):
    """Insert point p into an existing triangulation (locate by scan)."""
    px, py = float(pts[p, 0]), float(pts[p, 1])
    for a, b, c in _triangle_keys(apex):
        s_ab = orient2d(pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1], px, py)
        if s_ab < 0:
            continue
        s_bc = orient2d(pts[b, 0], pts[b, 1], pts[c, 0], pts[c, 1], px, py)
        if s_bc < 0:
            continue
        s_ca = orient2d(pts[c, 0], pts[c, 1], pts[a, 0], pts[a, 1], px, py)
        if s_ca < 0:
            continue
        zeros = (s_ab == 0) + (s_bc == 0) + (s_ca == 0)
        assert zeros < 2, "point coincides with an existing site"
        if zeros == 0:
            _remove_triangle(apex, a, b, c)
            _add_triangle(apex, a, b, p)
            _add_triangle(apex, b, c, p)
            _add_triangle(apex, c, a, p)
        elif s_ab == 0:
            _split_edge(apex, a, b, p)
        elif s_bc == 0:
            _split_edge(apex, b, c, p)
        else:
            _split_edge(apex, c, a, p)
        return
    _attach_outside(apex, pts, p)


def _split_edge(apex, i, j, p):
    """Split edge (i, j) at point p lying strictly between its endpoints."""
    k = apex[(i, j)]
    l = apex[(j, i)]
    assert k != GHOST
    _remove_triangle(apex, i, j, k)
    _add_triangle(apex, i, p, k)
    _add_triangle(apex, p, j, k)
    if l == GHOST:
        del apex[(j, i)]
        apex[(j, p)] = GHOST
        apex[(p, i)] = GHOST
    else:
        _remove_triangle(apex, j, i, l)
        _add_triangle(apex, j, p, l)
        _add_triangle(apex, p, i, l)


def _attach_outside(apex, pts, p):
    """Connect an outside point p to every hull edge it strictly sees."""
    px, py = float(pts[p, 0]), float(pts[p, 1])
    hull = [(u, v) for (v, u), c in apex.items() if c == GHOST]
    attached = False
    for u, v in hull:
        if orient2d(pts[u, 0], pts[u, 1], pts[v, 0], pts[v, 1], px, py) < 0:
            del apex[(v, u)]
            _add_triangle(apex, v, u, p)
            attached = True
    assert attached, "point is neither inside nor outside-visible"
    _complete_ghosts(apex)


def _lawson(apex, pts):
    """Flip until every interior edge is exactly locally Delaunay.

    Strict incircle violations always flip; exact cocircular ties flip only
    toward the lexicographically smaller diagonal, which makes the result
    canonical and guarantees termination.
    """
    queue = deque(e for e in apex if e[0] < e[1])
    queued = set(queue)
    budget = 10000 + 100 * len(pts)
    while queue:
        i, j = queue.popleft()
        queued.discard((i, j))
        k = apex.get((i, j))
        l = apex.get((j, i))
        if k is None or l is None or k == GHOST or l == GHOST:
            continue
        s = incircle(pts[i, 0], pts[i, 1], pts[j, 0], pts[j, 1],
                     pts[k, 0], pts[k, 1], pts[l, 0], pts[l, 1])
        if s < 0 or (s == 0 and not (min(k, l), max(k, l)) < (min(i, j), max(i, j))):
            continue
        budget -= 1
        assert budget > 0, "Lawson repair did not terminate"
        _remove_triangle(apex, i, j, k)
        _remove_triangle(apex, j, i, l)
        _add_triangle(apex, l, j, k)
        _add_triangle(apex, k, i, l)
        for a, b in ((l, j), (j, k), (k, i), (i, l)):
            e = (min(a, b), max(a, b))
            if e not in queued:
                queued.add(e)
                queue.append(e)
