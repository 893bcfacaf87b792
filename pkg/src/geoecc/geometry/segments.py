"""Free-standing segment and disc tests (exact verdicts)."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .predicates import orient2d


def segments_cross(s1, s2) -> bool:
    """True iff the segments meet in one interior point of both.

    Shared endpoints and endpoint-on-interior touches are not crossings.
    Collinear segments overlapping over positive length count as crossing.
    Degenerate (zero-length) segments never cross anything.
    """
    (p1, p2), (p3, p4) = s1, s2
    x1, y1 = float(p1[0]), float(p1[1])
    x2, y2 = float(p2[0]), float(p2[1])
    x3, y3 = float(p3[0]), float(p3[1])
    x4, y4 = float(p4[0]), float(p4[1])
    if (x1, y1) == (x2, y2) or (x3, y3) == (x4, y4):
        return False
    d1 = orient2d(x3, y3, x4, y4, x1, y1)
    d2 = orient2d(x3, y3, x4, y4, x2, y2)
    if d1 == 0 and d2 == 0:
        # Same line; crossing iff the 1D overlap has positive length.
        if abs(x2 - x1) >= abs(y2 - y1):
            a_lo, a_hi = sorted((x1, x2))
            b_lo, b_hi = sorted((x3, x4))
        else:
            a_lo, a_hi = sorted((y1, y2))
            b_lo, b_hi = sorted((y3, y4))
        return max(a_lo, b_lo) < min(a_hi, b_hi)
    d3 = orient2d(x1, y1, x2, y2, x3, y3)
    d4 = orient2d(x1, y1, x2, y2, x4, y4)
    return d1 * d2 < 0 and d3 * d4 < 0


def _normalize_sites(sites):
    """Accept either bare points or (id, point) pairs."""
    ids, pts = [], []
    for k, entry in enumerate(sites):
        second = entry[1]
        if hasattr(second, "__len__") and len(second) == 2:
            ids.append(int(entry[0]))
            pts.append((float(second[0]), float(second[1])))
        else:
            ids.append(k)
            pts.append((float(entry[0]), float(second)))
    return ids, pts


def gabriel_violations(sites, edges):
    """All (edge, witness) pairs breaking the Gabriel condition.

    A witness w lies strictly inside the disc whose diameter is the edge
    segment, i.e. the angle u-w-v is strictly obtuse: (pu-pw).(pv-pw) < 0.
    Points exactly on the circle are not violations.
    """
    ids, pts = _normalize_sites(sites)
    index = {sid: k for k, sid in enumerate(ids)}
    P = np.asarray(pts, dtype=float)
    out = []
    for u, v in edges:
        i, j = index[u], index[v]
        dux = P[i, 0] - P[:, 0]
        duy = P[i, 1] - P[:, 1]
        dvx = P[j, 0] - P[:, 0]
        dvy = P[j, 1] - P[:, 1]
        dot = dux * dvx + duy * dvy
        scale = dux * dux + duy * duy + dvx * dvx + dvy * dvy
        strict = np.flatnonzero(dot < -1e-12 * scale)
        border = np.flatnonzero(np.abs(dot) <= 1e-12 * scale)
        witnesses = set(int(w) for w in strict)
        for w in border:
            w = int(w)
            fx = Fraction(float(P[w, 0]))
            fy = Fraction(float(P[w, 1]))
            d = ((Fraction(float(P[i, 0])) - fx) * (Fraction(float(P[j, 0])) - fx)
                 + (Fraction(float(P[i, 1])) - fy) * (Fraction(float(P[j, 1])) - fy))
            if d < 0:
                witnesses.add(w)
        out.extend(((u, v), ids[w]) for w in sorted(witnesses))
    return out
