"""Bounded Voronoi subdivision over labeled sites.

The subdivision exposes two neighborhood relations that differ on purpose:

- ``delaunay_edges``: edges of the full-plane Delaunay triangulation (what
  an empty-circumcircle test over the sites yields).
- ``adjacency``: pairs whose Voronoi cells share a boundary segment of
  positive length inside the bounding box.  Near-collinear hull triples can
  push a shared boundary entirely outside any finite box, and cocircular
  diagonals touch at a single point, so adjacency is a strict subset of
  delaunay_edges in general.

Adjacency is decided exactly: the shared boundary of cells u and v is an
interval on their bisector line x(s) = M + s*T, intersected from linear
constraints (one per nearby site, four per box side).  Floating point gives
the interval first; any verdict within tolerance is recomputed in rational
arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DuplicateSites, SiteOutsideBox
from . import BoundingBox, Point2
from .delaunay import Triangulation, triangulate
from .predicates import compare_distance

_REL_TOL = 1e-9


@dataclass(frozen=True)
class Strip:
    """Positive-length shared cell boundary of an adjacent site pair.

    Endpoints are float approximations; each carries the constraint that
    terminates the interval there, either ("site", id) or ("box", side),
    from which the exact endpoint can be recomputed on demand.
    """
    u: int
    v: int
    p_lo: Point2
    p_hi: Point2
    bind_lo: tuple
    bind_hi: tuple


class PlanarSubdivision:
    """Delaunay/Voronoi structure of labeled sites clipped to a box."""

    def __init__(self, sites: list[tuple[int, Point2]], box: BoundingBox,
                 tri: Triangulation):
        self.sites = sites
        self.box = box
        self._tri = tri
        self._ids = [sid for sid, _ in sites]
        self._index = {sid: i for i, (sid, _) in enumerate(sites)}
        self._pos = tri.points
        self._nbr_idx = {i: nbrs for i, nbrs in tri.neighbors().items()}
        coords = np.abs(self._pos).max() if len(self._pos) else 1.0
        scale = max(1.0, float(coords),
                    abs(box.min.x), abs(box.min.y),
                    abs(box.max.x), abs(box.max.y))
        self._d2_band = 1e-12 * scale * scale
        self.delaunay_edges = {self._id_pair(a, b) for a, b in tri.edges()}
        self.adjacency: set[tuple[int, int]] = set()
        self.strips: dict[tuple[int, int], Strip] = {}
        for a, b in tri.edges():
            strip = self._make_strip(a, b)
            if strip is not None:
                pair = self._id_pair(a, b)
                self.adjacency.add(pair)
                self.strips[pair] = strip
        self._cells: dict[int, list[Point2]] | None = None

    # -- basic lookups -------------------------------------------------

    def _id_pair(self, i: int, j: int) -> tuple[int, int]:
        a, b = self._ids[i], self._ids[j]
        return (a, b) if a < b else (b, a)

    def index_of(self, site_id: int) -> int:
        return self._index[site_id]

    def position(self, site_id: int) -> Point2:
        i = self._index[site_id]
        return Point2(float(self._pos[i, 0]), float(self._pos[i, 1]))

    def neighbors_of(self, site_id: int) -> list[int]:
        """Full-plane Delaunay neighbor ids, sorted."""
        i = self._index[site_id]
        return sorted(self._ids[j] for j in self._nbr_idx[i])

    def adjacent_to(self, site_id: int) -> list[int]:
        """Ids whose cells share positive-length boundary inside the box."""
        out = []
        for a, b in self.adjacency:
            if a == site_id:
                out.append(b)
            elif b == site_id:
                out.append(a)
        return sorted(out)

    # -- nearest-site queries -------------------------------------------

    def owners(self, x: float, y: float) -> list[int]:
        """All site ids at exactly minimal distance from (x, y), sorted."""
        dx = self._pos[:, 0] - x
        dy = self._pos[:, 1] - y
        d2 = dx * dx + dy * dy
        m = float(d2.min())
        cand = np.flatnonzero(d2 <= m + m * _REL_TOL + self._d2_band)
        if len(cand) == 1:
            return [self._ids[int(cand[0])]]
        best = [int(cand[0])]
        for c in cand[1:]:
            c = int(c)
            s = compare_distance(x, y,
                                 self._pos[best[0], 0], self._pos[best[0], 1],
                                 self._pos[c, 0], self._pos[c, 1])
            if s > 0:
                best = [c]
            elif s == 0:
                best.append(c)
        return sorted(self._ids[i] for i in best)

    def owners_at(self, p) -> list[int]:
        """owners() dispatching on coordinate type (Fraction -> exact)."""
        x, y = p[0], p[1]
        if isinstance(x, Fraction) or isinstance(y, Fraction):
            return self.owners_exact(Fraction(x), Fraction(y))
        return self.owners(float(x), float(y))

    def owners_exact(self, xf: Fraction, yf: Fraction) -> list[int]:
        """owners() for an exact rational query point."""
        px, py = float(xf), float(yf)
        dx = self._pos[:, 0] - px
        dy = self._pos[:, 1] - py
        d2 = dx * dx + dy * dy
        m = float(d2.min())
        cand = np.flatnonzero(d2 <= m + m * _REL_TOL + 4.0 * self._d2_band)
        best: list[int] = []
        best_d: Fraction | None = None
        for c in sorted(int(c) for c in cand):
            sx = Fraction(float(self._pos[c, 0]))
            sy = Fraction(float(self._pos[c, 1]))
            d = (xf - sx) ** 2 + (yf - sy) ** 2
            if best_d is None or d < best_d:
                best, best_d = [c], d
            elif d == best_d:
                best.append(c)
        return sorted(self._ids[i] for i in best)

    # -- cell polygons ---------------------------------------------------

    @property
    def cells(self) -> dict[int, list[Point2]]:
        """Voronoi cell polygons clipped to the box, CCW, float precision."""
        if self._cells is None:
            self._cells = {self._ids[i]: self._cell_polygon(i)
                           for i in range(len(self._ids))}
        return self._cells

    def _cell_polygon(self, i: int) -> list[Point2]:
        b = self.box
        poly = [(b.min.x, b.min.y), (b.max.x, b.min.y),
                (b.max.x, b.max.y), (b.min.x, b.max.y)]
        ux, uy = self._pos[i]
        for w in self._nbr_idx[i]:
            wx, wy = self._pos[w]
            a = 2.0 * (wx - ux)
            bb = 2.0 * (wy - uy)
            c = wx * wx + wy * wy - ux * ux - uy * uy
            poly = _clip_halfplane(poly, a, bb, c)
            if not poly:
                break
        return [Point2(float(x), float(y)) for x, y in poly]

    # -- exact bisector intervals ----------------------------------------

    def _make_strip(self, i: int, j: int) -> Strip | None:
        # Canonical frame: order the pair by site id so that the interval,
        # its endpoints and the "lo"/"hi" labels are reproducible from ids.
        if self._ids[i] > self._ids[j]:
            i, j = j, i
        got = self._interval_float(i, j)
        if got == "escalate":
            got = self._interval_exact(i, j)
            if got is None:
                return None
            lo, hi, bind_lo, bind_hi = got
            lo, hi = float(lo), float(hi)
        elif got is None:
            return None
        else:
            lo, hi, bind_lo, bind_hi = got
        mx, my, tx, ty = self._bisector_frame_float(i, j)
        p_lo = Point2(mx + lo * tx, my + lo * ty)
        p_hi = Point2(mx + hi * tx, my + hi * ty)
        u_id, v_id = self._id_pair(i, j)
        return Strip(u_id, v_id, p_lo, p_hi, bind_lo, bind_hi)

    def _bisector_frame_float(self, i, j):
        ux, uy = float(self._pos[i, 0]), float(self._pos[i, 1])
        vx, vy = float(self._pos[j, 0]), float(self._pos[j, 1])
        return (ux + vx) / 2.0, (uy + vy) / 2.0, -(vy - uy), vx - ux

    def _constraint_sites(self, i, j):
        cand = set(self._nbr_idx[i]) | set(self._nbr_idx[j])
        cand.discard(i)
        cand.discard(j)
        return sorted(cand)

    def _interval_float(self, i, j):
        """Interval of s on the bisector, or None (empty) or "escalate"."""
        mx, my, tx, ty = self._bisector_frame_float(i, j)
        ux, uy = self._pos[i]
        b = self.box
        lo, hi = -np.inf, np.inf
        bind_lo = bind_hi = None
        scale = 0.0

        def add(bound, is_lower, tag):
            nonlocal lo, hi, bind_lo, bind_hi, scale
            scale = max(scale, abs(bound))
            if is_lower:
                if bound > lo:
                    lo, bind_lo = bound, tag
            else:
                if bound < hi:
                    hi, bind_hi = bound, tag

        for cm, ct, vmin, vmax, side_min, side_max in (
                (mx, tx, b.min.x, b.max.x, "left", "right"),
                (my, ty, b.min.y, b.max.y, "bottom", "top")):
            if ct > 0.0:
                add((vmin - cm) / ct, True, ("box", side_min))
                add((vmax - cm) / ct, False, ("box", side_max))
            elif ct < 0.0:
                add((vmax - cm) / ct, True, ("box", side_max))
                add((vmin - cm) / ct, False, ("box", side_min))
            # ct == 0: the midpoint coordinate lies inside the box already.

        du2 = (mx - ux) ** 2 + (my - uy) ** 2
        for w in self._constraint_sites(i, j):
            wx, wy = self._pos[w]
            g0 = (mx - wx) ** 2 + (my - wy) ** 2 - du2
            g1 = 2.0 * (tx * (ux - wx) + ty * (uy - wy))
            if g1 > 0.0:
                add(-g0 / g1, True, ("site", self._ids[w]))
            elif g1 < 0.0:
                add(-g0 / g1, False, ("site", self._ids[w]))
            elif g0 < 0.0:
                return None
        if not np.isfinite(lo) or not np.isfinite(hi):
            # Cannot happen: box sides bound s in both directions unless the
            # bisector is axis-parallel, and then the other pair binds.
            return "escalate"
        gap = hi - lo
        if abs(gap) <= _REL_TOL * max(1.0, scale):
            return "escalate"
        if gap < 0.0:
            return None
        return lo, hi, bind_lo, bind_hi

    def _interval_exact(self, i, j):
        """Rational-arithmetic version of _interval_float (no tolerance)."""
        ux, uy = Fraction(float(self._pos[i, 0])), Fraction(float(self._pos[i, 1]))
        vx, vy = Fraction(float(self._pos[j, 0])), Fraction(float(self._pos[j, 1]))
        mx, my = (ux + vx) / 2, (uy + vy) / 2
        tx, ty = -(vy - uy), vx - ux
        b = self.box
        lo = hi = None
        bind_lo = bind_hi = None

        def add(bound, is_lower, tag):
            nonlocal lo, hi, bind_lo, bind_hi
            if is_lower:
                if lo is None or bound > lo:
                    lo, bind_lo = bound, tag
            else:
                if hi is None or bound < hi:
                    hi, bind_hi = bound, tag

        for cm, ct, vmin, vmax, side_min, side_max in (
                (mx, tx, Fraction(b.min.x), Fraction(b.max.x), "left", "right"),
                (my, ty, Fraction(b.min.y), Fraction(b.max.y), "bottom", "top")):
            if ct > 0:
                add((vmin - cm) / ct, True, ("box", side_min))
                add((vmax - cm) / ct, False, ("box", side_max))
            elif ct < 0:
                add((vmax - cm) / ct, True, ("box", side_max))
                add((vmin - cm) / ct, False, ("box", side_min))

        du2 = (mx - ux) ** 2 + (my - uy) ** 2
        for w in self._constraint_sites(i, j):
            wx = Fraction(float(self._pos[w, 0]))
            wy = Fraction(float(self._pos[w, 1]))
            g0 = (mx - wx) ** 2 + (my - wy) ** 2 - du2
            g1 = 2 * (tx * (ux - wx) + ty * (uy - wy))
            if g1 > 0:
                add(-g0 / g1, True, ("site", self._ids[w]))
            elif g1 < 0:
                add(-g0 / g1, False, ("site", self._ids[w]))
            elif g0 < 0:
                return None
        assert lo is not None and hi is not None
        if not lo < hi:
            return None
        return lo, hi, bind_lo, bind_hi

    def strip_endpoint_exact(self, u_id: int, v_id: int,
                             end: str) -> tuple[Fraction, Fraction]:
        """Exact rational coordinates of a strip endpoint ("lo" or "hi")."""
        i, j = self._index[u_id], self._index[v_id]
        if self._ids[i] > self._ids[j]:
            i, j = j, i
        got = self._interval_exact(i, j)
        assert got is not None, "pair is not adjacent"
        lo, hi, _, _ = got
        s = lo if end == "lo" else hi
        ux, uy = Fraction(float(self._pos[i, 0])), Fraction(float(self._pos[i, 1]))
        vx, vy = Fraction(float(self._pos[j, 0])), Fraction(float(self._pos[j, 1]))
        mx, my = (ux + vx) / 2, (uy + vy) / 2
        tx, ty = -(vy - uy), vx - ux
        return mx + s * tx, my + s * ty


def _clip_halfplane(poly, a, b, c):
    """Keep the part of a convex CCW polygon with a*x + b*y <= c."""
    out = []
    n = len(poly)
    for idx in range(n):
        x1, y1 = poly[idx]
        x2, y2 = poly[(idx + 1) % n]
        in1 = a * x1 + b * y1 <= c
        in2 = a * x2 + b * y2 <= c
        if in1:
            out.append((x1, y1))
        if in1 != in2:
            denom = a * (x2 - x1) + b * (y2 - y1)
            t = (c - a * x1 - b * y1) / denom
            out.append((x1 + t * (x2 - x1), y1 + t * (y2 - y1)))
    return out


def build_subdivision(sites, box: BoundingBox) -> PlanarSubdivision:
    """Validate sites against the box and build the subdivision."""
    sites = [(int(sid), Point2(float(p[0]), float(p[1]))) for sid, p in sites]
    if not sites:
        raise ValueError("at least one site is required")
    box = BoundingBox(Point2(float(box[0][0]), float(box[0][1])),
                      Point2(float(box[1][0]), float(box[1][1])))
    if not (box.min.x < box.max.x and box.min.y < box.max.y):
        raise ValueError("degenerate bounding box")
    seen_pos: dict[tuple[float, float], int] = {}
    seen_ids: set[int] = set()
    for sid, p in sites:
        if sid in seen_ids:
            raise ValueError(f"duplicate site id {sid}")
        seen_ids.add(sid)
        key = (p.x, p.y)
        if key in seen_pos:
            raise DuplicateSites(seen_pos[key], sid)
        seen_pos[key] = sid
        if not box.strictly_contains(p.x, p.y):
            raise SiteOutsideBox(sid)
    tri = triangulate([(p.x, p.y) for _, p in sites])
    return PlanarSubdivision(sites, box, tri)


def default_box(positions, rect: BoundingBox | None = None,
                margin_factor: float = 2.0) -> BoundingBox:
    """Deployment region inflated by margin_factor x mean NN spacing."""
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pts) >= 2:
        d, _ = cKDTree(pts).query(pts, k=2)
        margin = margin_factor * float(d[:, 1].mean())
        if margin <= 0.0:
            margin = 1.0
    else:
        margin = 1.0
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    if rect is not None:
        xmin = min(xmin, rect.min.x)
        ymin = min(ymin, rect.min.y)
        xmax = max(xmax, rect.max.x)
        ymax = max(ymax, rect.max.y)
    return BoundingBox(Point2(float(xmin - margin), float(ymin - margin)),
                       Point2(float(xmax + margin), float(ymax + margin)))
