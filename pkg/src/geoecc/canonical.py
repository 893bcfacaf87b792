"""Zone structure a node simulates when it knows its k-hop neighborhood.

Each node u simulates the union of the Voronoi cells of itself and its
H-neighbors (H = G^k).  Boundaries between cells whose owners are not
H-neighbors cannot be crossed by a message: they are holes of the
simulated space S, kept symbolically as a set of forbidden cell-id pairs
(slits of width epsilon with epsilon -> 0).  A point is in S when it is
inside the box and not on a forbidden boundary; membership on shared
crossable boundaries is inclusive.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    Disconnected,
    GeocastViolation,
    HandoverStuck,
    PreconditionViolated,
)
from .geometry import PlanarSubdivision, Point2, build_subdivision, walk_segment
from .netgen import LocalizedNetwork
from .netgraph import KnowledgeGraph, power_graph


@dataclass(frozen=True)
class SpacePosition:
    """A point of the simulated space with the cells it belongs to."""
    p: Point2
    owners: frozenset[int]


class CanonicalSimulation:
    """Per-node zones over the Voronoi subdivision of apparent positions."""

    def __init__(self, net: LocalizedNetwork, k: int, H: KnowledgeGraph,
                 sub: PlanarSubdivision, zones: dict[int, frozenset[int]],
                 forbidden_boundaries: frozenset[tuple[int, int]]):
        self.net = net
        self.k = k
        self.H = H
        self.sub = sub
        self.zones = zones
        self.forbidden_boundaries = forbidden_boundaries

    def on_forbidden_boundary(self, owners) -> bool:
        """True when a point with these owners lies on a removed boundary."""
        ow = set(owners)
        if len(ow) < 2:
            return False
        return any(a in ow and b in ow for a, b in self.forbidden_boundaries)

    def locate(self, p) -> SpacePosition:
        owners = self.sub.owners_at(p)
        if self.on_forbidden_boundary(owners):
            raise PreconditionViolated(
                f"point {tuple(map(float, p))} lies on a forbidden boundary")
        return SpacePosition(p=p, owners=frozenset(owners))


def build_canonical(net: LocalizedNetwork, k: int) -> CanonicalSimulation:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not net.graph.is_connected():
        raise Disconnected("canonical simulation needs a connected network")
    H = power_graph(net.graph, k)
    sub = build_subdivision(list(enumerate(net.apparent_positions)),
                            net.routing_box())
    zones = {u: frozenset({u, *H.neighbors(u)}) for u in range(net.n)}
    forbidden = frozenset(
        (a, b) for a, b in sub.adjacency if not H.has_edge(a, b))
    return CanonicalSimulation(net=net, k=k, H=H, sub=sub, zones=zones,
                               forbidden_boundaries=forbidden)


def zone_contains(sim: CanonicalSimulation, u: int, p) -> bool:
    """Is p in Z_u: in a closed cell of u's zone, off forbidden boundaries."""
    owners = sim.sub.owners_at(p)
    if sim.on_forbidden_boundary(owners):
        return False
    return not sim.zones[u].isdisjoint(owners)


def geocast_target(sim: CanonicalSimulation, u: int, p) -> int:
    """The smallest-id nearest node to p among u and its H-neighbors.

    The nearest node to any point of Z_u is always u or an H-neighbor in
    this construction; a GeocastViolation therefore signals a broken
    simulation rather than an expected outcome.
    """
    owners = sim.sub.owners_at(p)
    if sim.on_forbidden_boundary(owners) or sim.zones[u].isdisjoint(owners):
        raise PreconditionViolated(f"point not in the zone of node {u}")
    cands = sim.zones[u].intersection(owners)
    if not cands:
        raise GeocastViolation(
            f"no nearest node to {tuple(map(float, p))} is known to {u}")
    return min(cands)


def _fpt(p) -> tuple[Fraction, Fraction]:
    """Lift a point to exact rational coordinates."""
    return (Fraction(p[0]), Fraction(p[1]))


def _vsub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _dot2(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def strip_span_exact(sim: CanonicalSimulation, pair: tuple[int, int]):
    """Exact endpoints (lo, hi) of the boundary strip between a cell pair.

    Returns None when the pair shares no positive-length boundary.  Results
    are cached on the simulation; strips are queried repeatedly during
    boundary walks.
    """
    cache = getattr(sim, "_strip_ends", None)
    if cache is None:
        cache = sim._strip_ends = {}
    if pair not in cache:
        if pair in sim.sub.strips:
            cache[pair] = (sim.sub.strip_endpoint_exact(pair[0], pair[1], "lo"),
                           sim.sub.strip_endpoint_exact(pair[0], pair[1], "hi"))
        else:
            cache[pair] = None
    return cache[pair]


#: Sentinel pair tagging rays contributed by the bounding box walls.
BOX_WALL = (-1, -1)


def blocking_rays(sim: CanonicalSimulation, P, tied):
    """Directions at P along which an impassable wall leaves the point.

    P must be exact and tied must be its owner set.  Each forbidden pair of
    tied cells whose strip passes through P contributes one ray per strip
    direction that actually extends from P (two when P is interior to the
    strip, one at an endpoint).  When P lies on the bounding box, the box
    edges through it contribute rays too (tagged BOX_WALL): the simulated
    space ends at the box, so nothing passes around a clipped strip end.
    Returns a list of (direction, pair) with exact rational directions.
    """
    rays = []
    ow = sorted(set(tied))
    for i, a in enumerate(ow):
        for b in ow[i + 1:]:
            pair = (a, b)
            if pair not in sim.forbidden_boundaries:
                continue
            ends = strip_span_exact(sim, pair)
            if ends is None:
                continue
            lo, hi = ends
            s = _vsub(hi, lo)
            t = _dot2(_vsub(P, lo), s) / _dot2(s, s)
            if t < 0 or t > 1:
                continue
            if t > 0:
                rays.append(((-s[0], -s[1]), pair))
            if t < 1:
                rays.append((s, pair))
    box = sim.sub.box
    x0, y0 = _fpt(box.min)
    x1, y1 = _fpt(box.max)
    px, py = P
    if py == y0 or py == y1:
        if px > x0:
            rays.append(((-1, 0), BOX_WALL))
        if px < x1:
            rays.append(((1, 0), BOX_WALL))
    if px == x0 or px == x1:
        if py > y0:
            rays.append(((0, -1), BOX_WALL))
        if py < y1:
            rays.append(((0, 1), BOX_WALL))
    return rays


def _strictly_between_ccw(a, r, b) -> bool:
    """Is direction r strictly inside the counterclockwise arc from a to b?"""
    cab = _cross2(a, b)
    car = _cross2(a, r)
    crb = _cross2(r, b)
    if cab > 0 or (cab == 0 and _dot2(a, b) < 0):
        return car > 0 and crb > 0
    if cab < 0:
        return car > 0 or crb > 0
    return False


def transition_passable(sim: CanonicalSimulation, P, from_cells, to_cells) -> bool:
    """Can a message at P move from some from-cell into some to-cell?

    The impassable walls through P (forbidden strips and, on the box
    boundary, the box edges) cut the directions around P into sectors; a
    transition is possible exactly when the site directions of some pair
    of cells share a sector (no blocking ray strictly between them on one
    side).  All tests are exact.
    """
    from_cells = set(from_cells)
    to_cells = set(to_cells)
    if from_cells & to_cells:
        return True
    tied = set(sim.sub.owners_at(P))
    rays = blocking_rays(sim, P, tied)
    if not rays:
        return True
    dirs = {c: _vsub(_fpt(sim.sub.position(c)), P)
            for c in from_cells | to_cells}
    for a in from_cells:
        for b in to_cells:
            ua, ub = dirs[a], dirs[b]
            if not any(_strictly_between_ccw(ua, r, ub) for r, _ in rays):
                return True
            if not any(_strictly_between_ccw(ub, r, ua) for r, _ in rays):
                return True
    return False


def _ray_exit_parameter(box, p, dir) -> Fraction:
    """Largest t with p + t*dir still inside the box (exact)."""
    px, py = Fraction(p[0]), Fraction(p[1])
    dx, dy = Fraction(dir[0]), Fraction(dir[1])
    if dx == 0 and dy == 0:
        raise PreconditionViolated("direction must be nonzero")
    t_max: Fraction | None = None
    for coord, d, lo, hi in ((px, dx, Fraction(box.min.x), Fraction(box.max.x)),
                             (py, dy, Fraction(box.min.y), Fraction(box.max.y))):
        if d == 0:
            continue
        t = ((hi if d > 0 else lo) - coord) / d
        t_max = t if t_max is None else min(t_max, t)
    assert t_max is not None
    if t_max <= 0:
        raise PreconditionViolated("direction leaves the bounding box")
    return t_max


def first_cells_entered(sim: CanonicalSimulation, p, dir) -> frozenset[int]:
    """Owners of the first open interval along dir from p (symbolic step).

    dir need not be unit length; rational inputs keep the query exact.
    """
    t = _ray_exit_parameter(sim.sub.box, p, dir)
    px, py = Fraction(p[0]), Fraction(p[1])
    q = (px + t * Fraction(dir[0]), py + t * Fraction(dir[1]))
    events = walk_segment(sim.sub, (px, py), q)
    assert len(events) >= 2
    return frozenset(events[1].owners)


def handover_target(sim: CanonicalSimulation, u: int, p, dir) -> int:
    """Neighbor taking over a message exiting Z_u at p along dir.

    Considers the cell transition at p: from the cells of zones[u]
    containing p into the first cells entered along dir.  If every path
    from the occupied cells into the entered cells crosses a forbidden
    strip at p (or the step runs along one), the exit is a hole boundary
    of S and HandoverStuck is raised.
    """
    owners = set(sim.sub.owners_at(p))
    from_cells = sim.zones[u].intersection(owners)
    if not from_cells:
        raise PreconditionViolated(f"point not in any cell of node {u}'s zone")
    entered = first_cells_entered(sim, p, dir)
    if u in entered:
        raise PreconditionViolated("step stays inside the node's own cell")
    if sim.on_forbidden_boundary(entered):
        raise HandoverStuck("step runs along a forbidden boundary")
    if not transition_passable(sim, _fpt(p), from_cells, entered):
        raise HandoverStuck("every transition at this point is forbidden")
    cands = [v for v in sim.H.neighbors(u)
             if not sim.zones[v].isdisjoint(entered)]
    if not cands:
        raise HandoverStuck("no neighbor zone covers the entered cells")
    return min(cands)
