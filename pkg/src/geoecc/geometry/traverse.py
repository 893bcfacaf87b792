"""Exact walk of a straight segment through the Voronoi cells.

The walk produces an alternating event stream: a point event (the full set
of sites tied for nearest at that parameter), a span event (the set tied
throughout the following open interval), and so on.  All tie decisions are
exact; parameters are rationals, so event points can be fed back in as
segment endpoints without losing exactness (navigation relies on this).

Fast path: candidate crossing parameters are screened in floating point;
only the winning candidate (and any candidate flagged as numerically
suspicious) is recomputed in rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import OutsideBox

_BAND = 1e-9


@dataclass(frozen=True)
class WalkPoint:
    """Sites tied for nearest exactly at parameter t."""
    t: Fraction
    owners: tuple[int, ...]


@dataclass(frozen=True)
class WalkSpan:
    """Sites tied for nearest throughout the open interval (t0, t1)."""
    t0: Fraction
    t1: Fraction
    owners: tuple[int, ...]


def as_fraction_point(p) -> tuple[Fraction, Fraction]:
    x, y = p[0], p[1]
    fx = x if isinstance(x, Fraction) else Fraction(float(x))
    fy = y if isinstance(y, Fraction) else Fraction(float(y))
    return fx, fy


def point_at(a, b, t: Fraction) -> tuple[Fraction, Fraction]:
    """Exact point a + t*(b - a)."""
    ax, ay = as_fraction_point(a)
    bx, by = as_fraction_point(b)
    return ax + t * (bx - ax), ay + t * (by - ay)


def walk_segment(sub, a, b) -> list:
    """Event stream for the segment from a to b (points and spans)."""
    ax, ay = as_fraction_point(a)
    bx, by = as_fraction_point(b)
    tied0 = sub.owners_exact(ax, ay)
    if (ax, ay) == (bx, by):
        return [WalkPoint(Fraction(0), tuple(tied0))]
    dx, dy = bx - ax, by - ay
    events: list = [WalkPoint(Fraction(0), tuple(tied0))]
    owners = _slope_argmax(sub, tied0, dx, dy)
    cur = Fraction(0)
    guard = 10 * len(sub._pos) + 16
    while True:
        guard -= 1
        assert guard > 0, "segment walk failed to advance"
        t_next, winners = _next_crossing(sub, owners, ax, ay, dx, dy, cur)
        span_ids = tuple(sorted(sub._ids[i] for i in owners))
        if t_next is None or t_next >= 1:
            events.append(WalkSpan(cur, Fraction(1), span_ids))
            events.append(WalkPoint(Fraction(1),
                                    tuple(sub.owners_exact(bx, by))))
            return events
        events.append(WalkSpan(cur, t_next, span_ids))
        union = owners | winners
        if len(union) == 2:
            tied = sorted(sub._ids[i] for i in union)
        else:
            # Three or more cells meet here: a Voronoi vertex.  Query the
            # exact point so cells touching only at the vertex (cocircular
            # diagonals, never crossing candidates) are picked up too.
            px, py = ax + t_next * dx, ay + t_next * dy
            tied = sub.owners_exact(px, py)
        events.append(WalkPoint(t_next, tuple(tied)))
        owners = _slope_argmax(sub, tied, dx, dy)
        cur = t_next


def _slope_argmax(sub, tied_ids, dx: Fraction, dy: Fraction) -> set[int]:
    """Indices of tied sites whose cell the walk enters just after the tie.

    Along direction d the derivative of squared distance to site s differs
    between tied sites only by the term -2 d.s, so the entered cells belong
    to the sites maximizing d.s (several when the tie persists on a span).
    """
    best_val = None
    best: list[int] = []
    for sid in tied_ids:
        i = sub._index[sid]
        sx = Fraction(float(sub._pos[i, 0]))
        sy = Fraction(float(sub._pos[i, 1]))
        val = dx * sx + dy * sy
        if best_val is None or val > best_val:
            best_val, best = val, [i]
        elif val == best_val:
            best.append(i)
    return set(best)


def _exact_coeffs(sub, rep: int, w: int, ax, ay, dx, dy):
    """f(t) = d^2(x(t), w) - d^2(x(t), rep) = f0 + t*f1, exactly."""
    rx = Fraction(float(sub._pos[rep, 0]))
    ry = Fraction(float(sub._pos[rep, 1]))
    wx = Fraction(float(sub._pos[w, 0]))
    wy = Fraction(float(sub._pos[w, 1]))
    f0 = (ax - wx) ** 2 + (ay - wy) ** 2 - (ax - rx) ** 2 - (ay - ry) ** 2
    f1 = 2 * (dx * (rx - wx) + dy * (ry - wy))
    return f0, f1


def _next_crossing(sub, owners: set[int], ax, ay, dx, dy, cur: Fraction):
    """Earliest parameter > cur where a non-owner site ties, with winners."""
    cands: set[int] = set()
    for o in owners:
        cands.update(sub._nbr_idx[o])
    cands -= owners
    if not cands:
        return None, set()
    rep = min(owners)
    afx, afy = float(ax), float(ay)
    dfx, dfy = float(dx), float(dy)
    rx, ry = float(sub._pos[rep, 0]), float(sub._pos[rep, 1])
    curf = float(cur)

    suspicious = False
    roots: list[tuple[float, int]] = []
    for w in sorted(cands):
        wx, wy = float(sub._pos[w, 0]), float(sub._pos[w, 1])
        dw2 = (afx - wx) ** 2 + (afy - wy) ** 2
        dr2 = (afx - rx) ** 2 + (afy - ry) ** 2
        f0 = dw2 - dr2
        f1 = 2.0 * (dfx * (rx - wx) + dfy * (ry - wy))
        s1 = 2.0 * (abs(dfx) + abs(dfy)) * (abs(rx - wx) + abs(ry - wy))
        if abs(f1) <= _BAND * s1:
            if f0 <= _BAND * (dw2 + dr2):
                suspicious = True
                break
            continue
        if f1 > 0.0:
            continue
        root = -f0 / f1
        if root < curf - _BAND * (1.0 + abs(curf)):
            suspicious = True  # cannot be behind the current point
            break
        if root > 1.0 + _BAND:
            continue
        roots.append((root, w))
    if suspicious:
        return _next_crossing_exact(sub, owners, rep, ax, ay, dx, dy, cur)
    if not roots:
        return None, set()
    roots.sort()
    best_root = roots[0][0]
    band = _BAND * (1.0 + abs(best_root))
    near = [w for r, w in roots if r <= best_root + band]
    if len(near) > 1 or best_root <= curf + band or best_root >= 1.0 - band:
        return _next_crossing_exact(sub, owners, rep, ax, ay, dx, dy, cur)
    w = near[0]
    f0, f1 = _exact_coeffs(sub, rep, w, ax, ay, dx, dy)
    assert f1 < 0
    t = -f0 / f1
    if not cur < t < 1:
        return _next_crossing_exact(sub, owners, rep, ax, ay, dx, dy, cur)
    return t, {w}


def _next_crossing_exact(sub, owners, rep, ax, ay, dx, dy, cur):
    cands: set[int] = set()
    for o in owners:
        cands.update(sub._nbr_idx[o])
    cands -= owners
    best_t = None
    winners: set[int] = set()
    for w in sorted(cands):
        f0, f1 = _exact_coeffs(sub, rep, w, ax, ay, dx, dy)
        if f1 >= 0:
            # No future crossing; f identically zero would mean w is
            # already tied with the owners, which owners_exact rules out.
            assert f1 > 0 or f0 > 0, "candidate tied along the whole span"
            continue
        t = -f0 / f1
        assert t >= cur, "crossing behind the current point"
        if t == cur or t > 1:
            continue
        if best_t is None or t < best_t:
            best_t, winners = t, {w}
        elif t == best_t:
            winners.add(w)
    if best_t is None:
        return None, set()
    return best_t, winners


def flatten_events(events) -> list[int]:
    """Flatten a walk event stream into the ordered cell list.

    Cells met only at a single parameter (the segment passes through a
    Voronoi vertex or touches a boundary point) are inserted there, sorted
    by id, excluding the cells already reported for the surrounding spans.
    Only event order and owner sets matter, so passing the reversed stream
    yields the flattening of the opposite walk direction.
    """
    if len(events) == 1:
        return list(events[0].owners)
    out: list[int] = []

    def push(ids):
        for x in ids:
            if not out or out[-1] != x:
                out.append(x)

    for idx, ev in enumerate(events):
        if isinstance(ev, WalkSpan):
            push(ev.owners)
            continue
        prev_set = events[idx - 1].owners if idx > 0 else ()
        next_set = events[idx + 1].owners if idx + 1 < len(events) else ()
        push(o for o in ev.owners if o not in prev_set and o not in next_set)
    return out


def cells_traversed(sub, seg) -> list[int]:
    """Ordered owners of the cells a segment meets, with the vertex rule."""
    (a, b) = seg
    for p in (a, b):
        if not sub.box.contains(float(p[0]), float(p[1])):
            raise OutsideBox(f"segment endpoint {tuple(p)} outside the box")
    return flatten_events(walk_segment(sub, a, b))
