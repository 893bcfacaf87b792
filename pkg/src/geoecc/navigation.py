"""Greedy geographic forwarding through simulated zones.

Two step engines move a message through the zone of its current holder.
The descent engine walks straight toward the target and slides along
blocking boundary strips, stopping at local minima of the target
distance.  The perimeter extension escapes those minima by walking hole
boundaries with the hole on the right, resuming descent at the first
boundary point strictly closer to the target (or equally close on the
target's side of the strip, which is how a message passes a slit whose
mirror point it reaches).  A generic routing loop chains engine steps
and handovers into full delivery attempts.

All walk geometry is exact: positions are rational, strips are queried
through their exact endpoints, and every comparison is a sign test on
rationals.  The bounding box is a hard wall: the simulated space ends
there, so nothing wraps around a strip end clipped by the box, and a
boundary walk that reaches the box continues along its edges (interior
on the left) until a forbidden strip leads back inside.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from .canonical import (
    BOX_WALL,
    CanonicalSimulation,
    _cross2,
    _dot2,
    _fpt,
    _strictly_between_ccw,
    _vsub,
    blocking_rays,
    geocast_target,
    handover_target,
    strip_span_exact,
    zone_contains,
)
from .errors import HandoverStuck, PerimeterLoop, PreconditionViolated
from .geometry import Point2, walk_segment
from .netgraph import bfs_distances

ARRIVED = "Arrived"
ZONE_BOUNDARY = "ZoneBoundary"
DEAD = "Dead"

DELIVERED = "Delivered"
DEAD_END = "DeadEnd"
HOP_CAP_EXCEEDED = "HopCapExceeded"

# Relative band (on squared distances) within which a boundary point is
# considered exactly as close as the reference local minimum.
_BAND_LO = (1 - Fraction(1e-12)) ** 2
_BAND_HI = (1 + Fraction(1e-12)) ** 2


@dataclass(frozen=True)
class PerimeterState:
    """Perimeter-mode bookkeeping that travels with a message.

    d2_target is the squared target distance at the last local minimum,
    arc is the boundary arc being walked, either a strip arc
    ((a, b), hug_cell, t) with t the position along the strip or a box
    arc (("box", side), None, t) along a box edge, and visited collects
    the arc keys entered since the last improvement; revisiting one means
    the orbit around the hole closed without progress.  wrap, when set,
    marks a turn in progress at the end of a strip arc: the walk is about
    to enter that cell's sector while wrapping around the strip tip, and
    the next holder continues the turn from there.
    """

    d2_target: Fraction | None = None
    arc: tuple | None = None
    visited: frozenset = frozenset()
    wrap: int | None = None


@dataclass(frozen=True)
class NavOutput:
    """One engine step: where the message now is and why the step ended.

    p_next and dir are exact rational pairs (dir is None unless the step
    ended on the zone boundary); path lists the waypoints of the step in
    order, ending at p_next.
    """

    p_next: tuple
    dir: tuple | None
    aux: PerimeterState | None
    status: str
    path: tuple = ()


@dataclass(frozen=True)
class RouteTrace:
    """Full record of one routing attempt."""

    hops: list[int]
    trajectory: list[Point2]
    handovers: int
    outcome: str
    dead_point: Point2 | None
    hop_count: int
    stretch: float
    hop_events: tuple = ()


# ---------------------------------------------------------------------------
# exact strip frames


def _strip_frame(sim, pair):
    """(lo, s, ss): exact strip origin, direction lo->hi and |s|^2."""
    ends = strip_span_exact(sim, pair)
    assert ends is not None, f"cells {pair} share no boundary strip"
    lo, hi = ends
    s = _vsub(hi, lo)
    return lo, s, _dot2(s, s)


def _param_on_strip(sim, pair, P) -> Fraction:
    lo, s, ss = _strip_frame(sim, pair)
    return _dot2(_vsub(P, lo), s) / ss


def _point_on_strip(sim, pair, t):
    lo, s, _ = _strip_frame(sim, pair)
    return (lo[0] + t * s[0], lo[1] + t * s[1])


def _site_dir(sim, c, P):
    """Exact direction from P toward site c (strictly into its cell)."""
    return _vsub(_fpt(sim.sub.position(c)), P)


def _hug_normal(sim, pair, hug):
    """Exact strip normal pointing into the hug cell."""
    a, b = pair
    other = b if hug == a else a
    return _vsub(_fpt(sim.sub.position(hug)), _fpt(sim.sub.position(other)))


def _rot_cw(v):
    return (v[1], -v[0])


def _walk_sign(sim, pair, hug) -> int:
    """+1 when walking with the hole on the right runs lo -> hi, else -1."""
    _, s, _ = _strip_frame(sim, pair)
    sg = _dot2(_rot_cw(_hug_normal(sim, pair, hug)), s)
    assert sg != 0
    return 1 if sg > 0 else -1


def _d2(a, b):
    dx, dy = a[0] - b[0], a[1] - b[1]
    return dx * dx + dy * dy


def _lerp(a, b, t):
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


# ---------------------------------------------------------------------------
# box edge frames

#: Side reached by walking a box edge to its far corner (interior left).
_BOX_NEXT = {"top": "left", "left": "bottom", "bottom": "right",
             "right": "top"}


def _box_frame(sim, side):
    """(lo, s, ss): exact frame of a box edge, interior on the left.

    Walking lo -> hi keeps the inside of the box on the left, so the
    exterior plays the hole-on-the-right role of a perimeter walk, and
    the four sides chain corner to corner in _BOX_NEXT order.
    """
    box = sim.sub.box
    x0, y0 = _fpt(box.min)
    x1, y1 = _fpt(box.max)
    lo, hi = {
        "top": ((x1, y1), (x0, y1)),
        "left": ((x0, y1), (x0, y0)),
        "bottom": ((x0, y0), (x1, y0)),
        "right": ((x1, y0), (x1, y1)),
    }[side]
    s = _vsub(hi, lo)
    return lo, s, _dot2(s, s)


def _box_side_at(sim, P, r):
    """The box side through P whose edge line carries direction r."""
    box = sim.sub.box
    x0, y0 = _fpt(box.min)
    x1, y1 = _fpt(box.max)
    px, py = P
    horizontal = r[1] == 0
    if horizontal and py == y1:
        return "top"
    if horizontal and py == y0:
        return "bottom"
    if not horizontal and px == x0:
        return "left"
    assert not horizontal and px == x1, "point is not on a box edge"
    return "right"


def _box_clips(sim, side):
    """Forbidden strips clipped by a box side, as sorted (t, pair, point).

    t is the exact parameter of the clipped strip end on the side's
    frame; these are the walls a walk along that edge runs into.
    """
    cache = getattr(sim, "_box_clip_cache", None)
    if cache is None:
        cache = sim._box_clip_cache = {}
    if side not in cache:
        lo, s, ss = _box_frame(sim, side)
        out = []
        for pair in sorted(sim.forbidden_boundaries):
            strip = sim.sub.strips[pair]
            for end, bind in ((0, strip.bind_lo), (1, strip.bind_hi)):
                if bind == ("box", side):
                    p = strip_span_exact(sim, pair)[end]
                    out.append((_dot2(_vsub(p, lo), s) / ss, pair, p))
        out.sort(key=lambda e: (e[0], e[1]))
        cache[side] = out
    return cache[side]


def _arc_key(arc):
    """Key identifying a boundary arc entry for orbit-loop detection.

    Strips repeat per (pair, hug side); box edges repeat per entry point,
    which separates slit detours re-entering a side from a true closed
    orbit.
    """
    pair, hug, t = arc
    if pair[0] == "box":
        return (pair, t)
    return (pair, hug)


# ---------------------------------------------------------------------------
# clockwise ray sweeps


def _cw_class(d0, r) -> int:
    """Coarse clockwise angle class of r measured from d0.

    1: within a half turn clockwise, 2: exactly opposite, 3: beyond a
    half turn, 4: along d0 (reached only after a full turn).
    """
    c = _cross2(d0, r)
    if c < 0:
        return 1
    if c > 0:
        return 3
    return 4 if _dot2(d0, r) > 0 else 2


def _cw_first(d0, rays):
    """The (direction, pair) ray reached first sweeping clockwise from d0."""

    def cmp(rp1, rp2):
        c1, c2 = _cw_class(d0, rp1[0]), _cw_class(d0, rp2[0])
        if c1 != c2:
            return -1 if c1 < c2 else 1
        cr = _cross2(rp2[0], rp1[0])
        if cr != 0:
            return -1 if cr > 0 else 1
        return -1 if rp1[1] < rp2[1] else (0 if rp1[1] == rp2[1] else 1)

    return min(rays, key=functools.cmp_to_key(cmp))


def _ccw_side(sim, pair, r):
    """The cell of pair on the counterclockwise side of strip direction r."""
    x, y = pair
    n_x = _vsub(_fpt(sim.sub.position(x)), _fpt(sim.sub.position(y)))
    return x if _cross2(r, n_x) > 0 else y


# ---------------------------------------------------------------------------
# straight descent walks


def _forbidden_inside(sim, cells):
    ow = sorted(cells)
    return [(a, b) for i, a in enumerate(ow) for b in ow[i + 1:]
            if (a, b) in sim.forbidden_boundaries]


def _ccw_cells(sim, P, tied):
    """Tied cells sorted counterclockwise by site direction from P."""

    def cmp(c1, c2):
        u1, u2 = _site_dir(sim, c1, P), _site_dir(sim, c2, P)
        h1 = 0 if (u1[1] > 0 or (u1[1] == 0 and u1[0] > 0)) else 1
        h2 = 0 if (u2[1] > 0 or (u2[1] == 0 and u2[0] > 0)) else 1
        if h1 != h2:
            return -1 if h1 < h2 else 1
        cr = _cross2(u1, u2)
        if cr != 0:
            return -1 if cr > 0 else 1
        return 0

    return sorted(tied, key=functools.cmp_to_key(cmp))


def _sweep(sim, P, order, rays, start, targets, rot):
    """Cells an epsilon walker crosses turning around P from start.

    Rotates through the tied-cell sectors at P in direction rot (+1
    counterclockwise, -1 clockwise) from the sector of start until it
    reaches a sector in targets.  Returns (swept, landing) with the
    intermediate cells crossed in order, or None when a blocking ray
    (forbidden strip or box wall) lies inside the arc turned through.
    """
    n = len(order)
    i = order.index(start)
    swept = []
    for _ in range(n):
        u1 = _site_dir(sim, order[i], P)
        i = (i + rot) % n
        c2 = order[i]
        u2 = _site_dir(sim, c2, P)
        if rot > 0:
            blocked = any(_strictly_between_ccw(u1, r, u2) for r, _ in rays)
        else:
            blocked = any(_strictly_between_ccw(u2, r, u1) for r, _ in rays)
        if blocked:
            return None
        if c2 in targets:
            return (swept, c2)
        swept.append(c2)
    return None


def _cross_point(sim, P, A, B, zones_u, strict_landing):
    """Resolve the transition from cells A into cells B at tie point P.

    Sweeps the epsilon detour around P sector by sector, preferring a
    rotation whose crossed cells all lie in zones_u, clockwise on ties.
    With strict_landing the walker commits to one side cell on arrival
    (landing on a forbidden boundary), so the landing cell must be in
    zones_u too; otherwise the landing span is inclusive and the caller
    checks it.  Returns ("pass", landing), ("exit", cell) when the walk
    must leave zones_u at P while entering cell, or ("blocked",) when
    every detour crosses a forbidden strip or leaves the box.
    """
    tied = set(sim.sub.owners_at(P))
    order = _ccw_cells(sim, P, tied)
    rays = blocking_rays(sim, P, tied)
    targets = B & tied
    assert targets, "span owners missing at the span endpoint"
    feasible = []
    for rot in (-1, 1):
        for a in sorted(A & tied):
            res = _sweep(sim, P, order, rays, a, targets, rot)
            if res is not None:
                feasible.append(res)
    if not feasible:
        return ("blocked",)
    for swept, landing in feasible:
        if all(c in zones_u for c in swept) and \
                (not strict_landing or landing in zones_u):
            return ("pass", landing)
    swept, landing = feasible[0]
    seq = swept + ([landing] if strict_landing else [])
    hit = next(c for c in seq if c not in zones_u)
    return ("exit", hit)


def _step_cells(sim, P, A, B, zones_u):
    """Cells effectively occupied entering span B at P from cells A.

    A walker on a forbidden boundary really travels an epsilon inside one
    side cell, so spans along forbidden strips collapse to that side.
    Returns ("pass", eff), ("exit", cell) for a forced zone exit at P
    into cell, or ("blocked",) when no transition from A into B is
    possible at P.
    """
    B = frozenset(B)
    pairs = _forbidden_inside(sim, B)
    if pairs:
        assert len(B) == 2, "span along several coincident boundaries"
        if A is None:
            raise PreconditionViolated("walk starts on a forbidden boundary")
        inter = A & B
        if inter:
            return ("pass", frozenset(inter))
        res = _cross_point(sim, P, A, B, zones_u, strict_landing=True)
        if res[0] != "pass":
            return res
        return ("pass", frozenset({res[1]}))
    if A is None or A & B:
        return ("pass", B)
    res = _cross_point(sim, P, A, B, zones_u, strict_landing=False)
    if res[0] != "pass":
        return res
    return ("pass", B)


def _attach(sim, P, A):
    """The boundary arc a blocked walker pins against at P.

    Sweeps clockwise from the direction of A's reference site; the first
    blocking ray is the wall the walker runs into.  A forbidden strip is
    hugged from the side the sweep approaches (the side reachable from
    A); a box edge starts a box arc at P instead (walked toward its far
    corner, which is the direction the clockwise sweep meets first).
    """
    tied = set(sim.sub.owners_at(P))
    rays = blocking_rays(sim, P, tied)
    assert rays, "blocked transition without a blocking ray at the point"
    anchor = min(A & tied) if A & tied else min(A)
    r1, pair = _cw_first(_site_dir(sim, anchor, P), rays)
    if pair == BOX_WALL:
        side = _box_side_at(sim, P, r1)
        lo, s, ss = _box_frame(sim, side)
        return (("box", side), None, _dot2(_vsub(P, lo), s) / ss)
    hug = _ccw_side(sim, pair, r1)
    return (pair, hug, _param_on_strip(sim, pair, P))


def _gradient_run(sim, u, p, target, entry_cells=None):
    """Steepest-descent trajectory from p toward target inside Z_u.

    Returns (kind, payload, waypoints) with kind one of:
      "arrived": payload None, the walk reached the target;
      "zone":    payload (q, dir), the walk leaves Z_u at q along dir;
      "dead":    payload (q, arc), a local minimum at q pinned against
                 arc ((a, b), hug, t).
    """
    zones_u = sim.zones[u]
    T = _fpt(target)
    cur = _fpt(p)
    if entry_cells:
        eff = frozenset(entry_cells)
    else:
        eff = frozenset(zones_u & set(sim.sub.owners_at(cur))) or None
    waypoints: list = []
    budget = 8 * len(sim.sub.strips) + 64
    while True:
        budget -= 1
        assert budget >= 0, "descent walk exceeded its step budget"
        if cur == T:
            if not waypoints or waypoints[-1] != T:
                waypoints.append(T)
            return ("arrived", None, waypoints)
        events = walk_segment(sim.sub, cur, T)
        verdict = None
        for i in range(1, len(events), 2):
            pt, span = events[i - 1], events[i]
            P = _lerp(cur, T, pt.t)
            res = _step_cells(sim, P, eff, frozenset(span.owners), zones_u)
            if res[0] == "blocked":
                verdict = ("blocked", P)
                break
            if res[0] == "exit":
                verdict = ("exit", P, res[1])
                break
            eff = res[1]
            if zones_u.isdisjoint(eff):
                verdict = ("zone", P)
                break
        if verdict is None:
            waypoints.append(T)
            return ("arrived", None, waypoints)
        if verdict[0] == "zone":
            q = verdict[1]
            waypoints.append(q)
            return ("zone", (q, _vsub(T, q)), waypoints)
        if verdict[0] == "exit":
            q, cell = verdict[1], verdict[2]
            waypoints.append(q)
            return ("zone", (q, _site_dir(sim, cell, q)), waypoints)
        q = verdict[1]
        arc = _attach(sim, q, eff if eff else {u})
        pair, hug, t_q = arc
        if q != cur:
            waypoints.append(q)
        if pair[0] == "box":
            # Wedged where a forbidden strip pinches against the box
            # wall.  Descent stops here; the perimeter recovery walks the
            # edge and resumes at any strictly closer point, which covers
            # the case of a target foot further along the edge.
            return ("dead", (q, arc), waypoints)
        if hug not in zones_u:
            return ("zone", (q, _site_dir(sim, hug, q)), waypoints)
        lo, s, ss = _strip_frame(sim, pair)
        t_f = _dot2(_vsub(T, lo), s) / ss
        t_stop = min(max(t_f, Fraction(0)), Fraction(1))
        if t_stop == t_q:
            return ("dead", (q, arc), waypoints)
        stop = _point_on_strip(sim, pair, t_stop)
        waypoints.append(stop)
        if 0 < t_stop < 1:
            return ("dead", (stop, (pair, hug, t_stop)), waypoints)
        cur = stop
        eff = frozenset({hug})


# ---------------------------------------------------------------------------
# perimeter walks


def _target_on_hug_side(sim, pair, hug, T):
    lo, _, _ = _strip_frame(sim, pair)
    return _dot2(_vsub(T, lo), _hug_normal(sim, pair, hug)) > 0


def _pivot(sim, P, pair, hug):
    """Turn at a strip endpoint: the next arc clockwise around the tip.

    Only forbidden strips through P block the sweep; with none the walk
    u-turns onto the other side of its own strip (which the sweep finds
    by itself after a full turn).  Returns (cells, pair2, hug2, t2):
    cells are the sectors the wrap crosses after leaving the hug cell,
    in clockwise order ending at hug2, the hug side of the new arc.
    """
    tied = set(sim.sub.owners_at(P))
    rays = blocking_rays(sim, P, tied)
    sg = _walk_sign(sim, pair, hug)
    _, s, _ = _strip_frame(sim, pair)
    back = (-sg * s[0], -sg * s[1])
    r1, pair2 = _cw_first(back, rays)
    assert pair2 != BOX_WALL, "site-bound strip end exactly on the box edge"
    hug2 = _ccw_side(sim, pair2, r1)

    def cmp(v1, v2):
        c1, c2 = _cw_class(back, v1), _cw_class(back, v2)
        if c1 != c2:
            return -1 if c1 < c2 else 1
        cr = _cross2(v2, v1)
        return 0 if cr == 0 else (-1 if cr > 0 else 1)

    crossed = [(d, c) for c in tied if c != hug
               for d in (_site_dir(sim, c, P),) if cmp(d, r1) < 0]
    crossed.sort(key=functools.cmp_to_key(lambda a, b: cmp(a[0], b[0])))
    cells = [c for _, c in crossed]
    if not cells or cells[-1] != hug2:
        cells.append(hug2)
    return (cells, pair2, hug2, _param_on_strip(sim, pair2, P))


def _box_arc_step(sim, zones_u, d2o, side, t, eff, T, waypoints):
    """Walk one slice of a box-edge arc: from t to the next forbidden
    clip of the side, or to its far corner.

    eff is the cell set the walker effectively occupies entering the
    slice (None to infer it from the zone).  Returns one of
      ("resume", point): a strictly improving boundary point reached;
      ("zone", P, dir, t_at): the walk leaves zones_u at P along dir;
      ("corner", eff): the slice ends at the side's far corner;
      ("turn", pair, hug, t_on, eff): the slice ends at a forbidden strip
        clipped there, and the orbit turns onto it hugging the approach
        cell (t_on is the strip parameter of the clipped end).
    """
    lo, s, ss = _box_frame(sim, side)
    nxt = next(((tc, pr, p) for tc, pr, p in _box_clips(sim, side)
                if tc > t), None)
    if nxt is None:
        t_stop, pair_n = Fraction(1), None
        P_stop = (lo[0] + s[0], lo[1] + s[1])
    else:
        t_stop, pair_n, P_stop = nxt
    Pa = (lo[0] + t * s[0], lo[1] + t * s[1])
    if eff is None:
        eff = frozenset(zones_u & set(sim.sub.owners_at(Pa)))
    t_f = _dot2(_vsub(T, lo), s) / ss
    if Pa != P_stop:
        span_len = t_stop - t
        events = walk_segment(sim.sub, Pa, P_stop)
        for i in range(1, len(events), 2):
            pt_ev, span = events[i - 1], events[i]
            P = _lerp(Pa, P_stop, pt_ev.t)
            res = _step_cells(sim, P, eff, frozenset(span.owners), zones_u)
            assert res[0] != "blocked", "box edge walk blocked between clips"
            t_at = t + pt_ev.t * span_len
            if res[0] == "exit":
                waypoints.append(P)
                return ("zone", P, _site_dir(sim, res[1], P), t_at)
            eff = res[1]
            if zones_u.isdisjoint(eff):
                waypoints.append(P)
                return ("zone", P, s, t_at)
            t_c = min(max(t_f, t + span.t0 * span_len), t + span.t1 * span_len)
            q2 = _d2((lo[0] + t_c * s[0], lo[1] + t_c * s[1]), T)
            if q2 < d2o * _BAND_LO:
                res_pt = (lo[0] + t_c * s[0], lo[1] + t_c * s[1])
                waypoints.append(res_pt)
                return ("resume", res_pt)
    if not waypoints or waypoints[-1] != P_stop:
        waypoints.append(P_stop)
    if pair_n is None:
        return ("corner", eff)
    inside = [c for c in pair_n if c in eff]
    assert len(inside) == 1, "box walk reached a clip outside its strip cells"
    return ("turn", pair_n, inside[0], _param_on_strip(sim, pair_n, P_stop),
            eff)


def _arc_walk(sim, u, state, T, waypoints):
    """Walk hole boundaries (hole on the right) from state.arc.

    Arcs are cell-boundary strips ((a, b), hug_cell, t) or box-edge runs
    (("box", side), None, t); the box is a hard wall, so an orbit that
    reaches it continues along the box edges until a forbidden strip
    leads back inside.  Returns ("resume", point, new_state, hug) at the
    first boundary point the descent may resume from (hug identifies
    which side of a strip the walker stands on, None on a box edge), or
    ("exit", P, dir, new_state) when the walk is about to enter a cell
    outside Z_u.  Raises PerimeterLoop when an orbit closes without
    improvement.
    """
    zones_u = sim.zones[u]
    d2o = state.d2_target
    pair, hug, t = state.arc
    wrap = state.wrap
    visited = set(state.visited)
    eff = None
    budget = 8 * len(sim.sub.strips) + 64
    while True:
        budget -= 1
        assert budget >= 0, "boundary walk exceeded its arc budget"
        if pair[0] == "box":
            assert wrap is None, "box arcs have no turn to resume"
            step = _box_arc_step(sim, zones_u, d2o, pair[1], t, eff, T,
                                 waypoints)
            if step[0] == "resume":
                st = PerimeterState(d2_target=d2o, arc=None,
                                    visited=frozenset())
                return ("resume", step[1], st, None)
            if step[0] == "zone":
                _, P, out_dir, t_at = step
                st = PerimeterState(d2_target=d2o, arc=(pair, None, t_at),
                                    visited=frozenset(visited))
                return ("exit", P, out_dir, st)
            if step[0] == "corner":
                eff = step[1]
                pair = ("box", _BOX_NEXT[pair[1]])
                t = Fraction(0)
            else:
                _, pair_n, hug_n, t_on, eff = step
                pair, hug, t = pair_n, hug_n, t_on
            key = _arc_key((pair, hug, t))
            if key in visited:
                raise PerimeterLoop(
                    f"boundary orbit closed without progress at node {u}")
            visited.add(key)
            continue
        sg = _walk_sign(sim, pair, hug)
        t_end = Fraction(1 if sg > 0 else 0)
        if wrap is None:
            lo, s, ss = _strip_frame(sim, pair)
            t_f = _dot2(_vsub(T, lo), s) / ss
            t_c = (min(max(t_f, t), t_end) if sg > 0
                   else max(min(t_f, t), t_end))
            q2 = _d2(_point_on_strip(sim, pair, t_c), T)
            if q2 < d2o * _BAND_LO or (q2 <= d2o * _BAND_HI
                                       and _target_on_hug_side(sim, pair, hug, T)):
                res = _point_on_strip(sim, pair, t_c)
                waypoints.append(res)
                st = PerimeterState(d2_target=d2o, arc=None,
                                    visited=frozenset())
                return ("resume", res, st, hug)
        P = _point_on_strip(sim, pair, t_end)
        if not waypoints or waypoints[-1] != P:
            waypoints.append(P)
        strip = sim.sub.strips[pair]
        bind = strip.bind_hi if sg > 0 else strip.bind_lo
        if bind[0] == "box":
            assert wrap is None, "a box-bound strip end has no turn state"
            side = bind[1]
            lo_b, s_b, ss_b = _box_frame(sim, side)
            t_b = _dot2(_vsub(P, lo_b), s_b) / ss_b
            key = _arc_key((("box", side), None, t_b))
            if key in visited:
                raise PerimeterLoop(
                    f"boundary orbit closed without progress at node {u}")
            visited.add(key)
            eff = frozenset({hug})
            pair, hug, t = ("box", side), None, t_b
            continue
        cells, pair2, hug2, t2 = _pivot(sim, P, pair, hug)
        if wrap is not None:
            assert wrap in cells, "resumed turn lost its sector"
            cells = cells[cells.index(wrap):]
            wrap = None
        hit = next((c for c in cells if c not in zones_u), None)
        if hit is not None:
            st = PerimeterState(d2_target=d2o, arc=(pair, hug, t_end),
                                visited=frozenset(visited), wrap=hit)
            return ("exit", P, _site_dir(sim, hit, P), st)
        if (pair2, hug2) in visited:
            raise PerimeterLoop(
                f"boundary orbit closed without progress at node {u}")
        visited.add((pair2, hug2))
        pair, hug, t = pair2, hug2, t2


def _require_in_zone(sim, u, p):
    """Closed-zone membership: some cell of Z_u contains p.

    Boundary points are admitted inclusively, tips of forbidden strips
    included: a walk resuming there really stands an epsilon inside one
    of its cells, and walks that would run along a slit are rejected by
    the walk itself.
    """
    if sim.zones[u].isdisjoint(sim.sub.owners_at(p)):
        raise PreconditionViolated(f"position not in the zone of node {u}")


def gradient_step(sim: CanonicalSimulation, u: int, p, target) -> NavOutput:
    """Steepest-descent step: straight toward the target, sliding along
    blocking strips, until arrival, a zone exit, or a local minimum."""
    _require_in_zone(sim, u, p)
    kind, payload, wp = _gradient_run(sim, u, p, target)
    if kind == "arrived":
        return NavOutput(p_next=wp[-1], dir=None, aux=None,
                         status=ARRIVED, path=tuple(wp))
    if kind == "zone":
        q, d = payload
        return NavOutput(p_next=q, dir=d, aux=None,
                         status=ZONE_BOUNDARY, path=tuple(wp))
    q, _arc = payload
    return NavOutput(p_next=q, dir=None, aux=None, status=DEAD,
                     path=tuple(wp))


def gradient_perimeter_step(sim: CanonicalSimulation, u: int, p, target,
                            d_o=None) -> NavOutput:
    """Descent with perimeter recovery; never reports a local minimum.

    d_o carries the recovery bookkeeping between steps: pass the aux of
    the previous NavOutput (a PerimeterState) or a plain reference
    distance.  Raises PerimeterLoop when a hole orbit closes without
    finding a point closer to the target.
    """
    _require_in_zone(sim, u, p)
    T = _fpt(target)
    cur = _fpt(p)
    if isinstance(d_o, PerimeterState):
        state = d_o
    elif d_o is None:
        state = PerimeterState()
    else:
        state = PerimeterState(d2_target=Fraction(d_o) ** 2)
    if state.d2_target is None:
        state = PerimeterState(d2_target=_d2(cur, T), arc=state.arc,
                               visited=state.visited)
    waypoints: list = []
    entry = None
    budget = 8 * len(sim.sub.strips) + 32
    while True:
        budget -= 1
        assert budget >= 0, "engine exceeded its descent/recovery budget"
        if state.arc is None:
            kind, payload, wp = _gradient_run(sim, u, cur, T,
                                              entry_cells=entry)
            waypoints += wp
            entry = None
            if kind == "arrived":
                return NavOutput(p_next=waypoints[-1], dir=None, aux=None,
                                 status=ARRIVED, path=tuple(waypoints))
            if kind == "zone":
                q, d = payload
                st = PerimeterState(d2_target=state.d2_target, arc=None,
                                    visited=frozenset())
                return NavOutput(p_next=q, dir=d, aux=st,
                                 status=ZONE_BOUNDARY, path=tuple(waypoints))
            q, arc = payload
            state = PerimeterState(d2_target=_d2(q, T), arc=arc,
                                   visited=frozenset({_arc_key(arc)}))
            cur = q
            continue
        res = _arc_walk(sim, u, state, T, waypoints)
        if res[0] == "resume":
            _, cur, state, hug = res
            entry = frozenset({hug}) if hug is not None else None
            continue
        _, P, out_dir, st = res
        return NavOutput(p_next=P, dir=out_dir, aux=st,
                         status=ZONE_BOUNDARY, path=tuple(waypoints))


_ENGINES = {
    "gradient": gradient_step,
    "gradient_perimeter": gradient_perimeter_step,
}


def route(sim: CanonicalSimulation, engine: str, source: int, dest: int,
          hop_cap: int | None = None) -> RouteTrace:
    """Route a message from source to dest, one engine step per holder.

    A holder whose zone contains the target hands the message to the
    nearest node by geocast, ending the attempt.  Zone exits go through
    handover_target; a stuck handover, a local minimum, or a closed
    perimeter orbit ends the attempt as a dead end.  The hop budget
    defaults to 10 * n.
    """
    if engine not in _ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    n = sim.net.n
    if not (0 <= source < n and 0 <= dest < n):
        raise ValueError("source and dest must be node ids")
    cap = 10 * n if hop_cap is None else hop_cap
    p_t = sim.net.apparent_positions[dest]
    T = _fpt(p_t)
    u = source
    cur = _fpt(sim.net.apparent_positions[source])
    aux: PerimeterState | None = None
    hops = [source]
    traj = [Point2(float(cur[0]), float(cur[1]))]
    events: list = []
    handovers = 0
    outcome = None
    dead = None

    def extend_traj(points):
        for x, y in points:
            q = Point2(float(x), float(y))
            if traj[-1] != q:
                traj.append(q)

    while True:
        if zone_contains(sim, u, p_t):
            w = geocast_target(sim, u, p_t)
            extend_traj([T])
            events.append((u, T, ARRIVED))
            if w != u:
                assert sim.H.has_edge(u, w)
                hops.append(w)
                events.append((w, T, ARRIVED))
            outcome = DELIVERED
            break
        try:
            if engine == "gradient":
                out = gradient_step(sim, u, cur, T)
            else:
                out = gradient_perimeter_step(sim, u, cur, T, d_o=aux)
        except PerimeterLoop:
            events.append((u, cur, DEAD))
            outcome = DEAD_END
            dead = cur
            break
        extend_traj(out.path)
        if out.status == DEAD:
            events.append((u, out.p_next, DEAD))
            outcome = DEAD_END
            dead = out.p_next
            break
        if out.status == ARRIVED:
            events.append((u, out.p_next, ARRIVED))
            if u != dest:
                assert sim.H.has_edge(u, dest)
                hops.append(dest)
                events.append((dest, T, ARRIVED))
            outcome = DELIVERED
            break
        try:
            v = handover_target(sim, u, out.p_next, out.dir)
        except HandoverStuck:
            events.append((u, out.p_next, ZONE_BOUNDARY))
            outcome = DEAD_END
            dead = out.p_next
            break
        events.append((u, out.p_next, ZONE_BOUNDARY))
        assert v != u and sim.H.has_edge(u, v)
        hops.append(v)
        handovers += 1
        if len(hops) - 1 > cap:
            outcome = HOP_CAP_EXCEEDED
            break
        u = v
        cur = out.p_next
        aux = out.aux

    hop_count = len(hops) - 1
    base = int(bfs_distances(sim.net.graph, source)[dest])
    stretch = (hop_count / base) if base > 0 else 1.0
    return RouteTrace(
        hops=hops,
        trajectory=traj,
        handovers=handovers,
        outcome=outcome,
        dead_point=(Point2(float(dead[0]), float(dead[1]))
                    if dead is not None else None),
        hop_count=hop_count,
        stretch=float(stretch),
        hop_events=tuple((nd, Point2(float(q[0]), float(q[1])), via)
                         for nd, q, via in events),
    )


def format_trace(trace: RouteTrace) -> str:
    """Render a routing attempt as one hop event per line."""
    lines = [f"hop {nd} at ({q.x!r},{q.y!r}) via {via}"
             for nd, q, via in trace.hop_events]
    lines.append(f"outcome {trace.outcome}")
    return "\n".join(lines) + "\n"
