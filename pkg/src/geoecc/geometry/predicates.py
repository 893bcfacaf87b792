"""Exact geometric predicates on float coordinates.

Each predicate first evaluates a floating-point expression with a forward
error bound; only when the result is smaller than the bound does it fall
back to exact rational arithmetic (floats are dyadic rationals, so the
Fraction conversion is lossless).  The filter constants follow the classic
adaptive-precision treatment of the orientation and incircle determinants.
"""
from __future__ import annotations

from fractions import Fraction

_EPS = 2.220446049250313e-16  # 2**-52
_CCW_ERR_A = (3.0 + 16.0 * _EPS) * _EPS
_ICC_ERR_A = (10.0 + 96.0 * _EPS) * _EPS


def _sign(x) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def orient2d(ax: float, ay: float, bx: float, by: float,
             cx: float, cy: float) -> int:
    """Sign of the signed area of triangle (a, b, c).

    Returns +1 if c lies to the left of the directed line a->b (counter
    clockwise turn), -1 if to the right, 0 if the three points are exactly
    collinear.
    """
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright

    if detleft > 0.0:
        if detright <= 0.0:
            return _sign(det)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return _sign(det)
        detsum = -detleft - detright
    else:
        return _sign(det)

    if abs(det) >= _CCW_ERR_A * detsum:
        return _sign(det)
    return _orient2d_exact(ax, ay, bx, by, cx, cy)


def _orient2d_exact(ax, ay, bx, by, cx, cy) -> int:
    ax, ay = Fraction(ax), Fraction(ay)
    bx, by = Fraction(bx), Fraction(by)
    cx, cy = Fraction(cx), Fraction(cy)
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return _sign(det)


def incircle(ax: float, ay: float, bx: float, by: float,
             cx: float, cy: float, dx: float, dy: float) -> int:
    """Sign of the incircle determinant for triangle (a, b, c) and point d.

    For a counterclockwise triangle the result is +1 if d lies strictly
    inside the circumcircle, -1 if strictly outside, 0 if cocircular.
    """
    adx = ax - dx
    ady = ay - dy
    bdx = bx - dx
    bdy = by - dy
    cdx = cx - dx
    cdy = cy - dy

    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady

    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy

    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy

    det = (alift * (bdxcdy - cdxbdy)
           + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))

    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    errbound = _ICC_ERR_A * permanent
    if abs(det) > errbound:
        return _sign(det)
    return _incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def _incircle_exact(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    ax, ay = Fraction(ax), Fraction(ay)
    bx, by = Fraction(bx), Fraction(by)
    cx, cy = Fraction(cx), Fraction(cy)
    dx, dy = Fraction(dx), Fraction(dy)
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return _sign(det)


def compare_distance(px: float, py: float, ax: float, ay: float,
                     bx: float, by: float) -> int:
    """Sign of |p - a|^2 - |p - b|^2, computed exactly.

    +1 means p is strictly closer to b, -1 strictly closer to a, 0 means
    exactly equidistant.
    """
    dax = px - ax
    day = py - ay
    dbx = px - bx
    dby = py - by
    da = dax * dax + day * day
    db = dbx * dbx + dby * dby
    diff = da - db
    # The float evaluation of each squared distance carries a relative
    # error of a few ulps; anything clearly larger than that is decided
    # without exact arithmetic.
    if abs(diff) > 1e-12 * (da + db):
        return _sign(diff)
    return _compare_distance_exact(px, py, ax, ay, bx, by)


def _compare_distance_exact(px, py, ax, ay, bx, by) -> int:
    px, py = Fraction(px), Fraction(py)
    ax, ay = Fraction(ax), Fraction(ay)
    bx, by = Fraction(bx), Fraction(by)
    da = (px - ax) ** 2 + (py - ay) ** 2
    db = (px - bx) ** 2 + (py - by) ** 2
    return _sign(da - db)


def on_segment(ax: float, ay: float, bx: float, by: float,
               px: float, py: float) -> bool:
    """True if p lies on the closed segment from a to b (exact test)."""
    if orient2d(ax, ay, bx, by, px, py) != 0:
        return False
    return (min(ax, bx) <= px <= max(ax, bx)
            and min(ay, by) <= py <= max(ay, by))
