"""Robust 2D computational geometry.

Plain named tuples for points, segments and boxes; exact predicates in
``predicates``; Delaunay triangulation in ``delaunay``; the bounded Voronoi
subdivision and its queries in ``subdivision``; segment-through-cells walks
in ``traverse``; free-standing segment tests in ``segments``.
"""
from __future__ import annotations

from typing import NamedTuple


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point2
    b: Point2


class BoundingBox(NamedTuple):
    min: Point2
    max: Point2

    def contains(self, x: float, y: float) -> bool:
        return (self.min.x <= x <= self.max.x
                and self.min.y <= y <= self.max.y)

    def strictly_contains(self, x: float, y: float) -> bool:
        return (self.min.x < x < self.max.x
                and self.min.y < y < self.max.y)


from .segments import gabriel_violations, segments_cross  # noqa: E402
from .subdivision import (  # noqa: E402
    PlanarSubdivision,
    Strip,
    build_subdivision,
    default_box,
)
from .traverse import cells_traversed, flatten_events, walk_segment  # noqa: E402

__all__ = [
    "Point2",
    "Segment",
    "BoundingBox",
    "PlanarSubdivision",
    "Strip",
    "build_subdivision",
    "default_box",
    "cells_traversed",
    "flatten_events",
    "walk_segment",
    "segments_cross",
    "gabriel_violations",
]
