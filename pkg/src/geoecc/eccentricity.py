"""Fitness metrics for geographic routing over a localized network.

All three localities reduce to maxima of hop distances collected from the
Voronoi subdivision of the apparent positions:

* k_T: largest hop distance between Delaunay-adjacent nodes.
* k_e: smallest k such that every pair of consecutively traversed cells
  along any link segment is within k hops.
* k_g: smallest k >= k_e such that every cell traversed by a link segment
  belongs to a k-hop neighbor of either endpoint.

Each condition is of the form "all collected distances <= k", so the
smallest satisfying k is just the largest collected distance; the scan
over candidate k values collapses to a max.  Cells touched only at a
single point (Voronoi vertices on the segment) are counted, which can
only increase the metrics; segments are flattened in both directions
because the insertion order of point-tied cells depends on direction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Disconnected
from .geometry import PlanarSubdivision, build_subdivision, flatten_events, walk_segment
from .netgen import LocalizedNetwork
from .netgraph import all_pairs_distances


@dataclass(frozen=True)
class EccentricityReport:
    D: int
    N: dict[int, float]
    k_T: int
    k_e: int
    k_g: int
    dk: int
    dN: float
    metadata: dict = field(default_factory=dict)


def _subdivision(net: LocalizedNetwork) -> PlanarSubdivision:
    box = net.routing_box()
    return build_subdivision(list(enumerate(net.apparent_positions)), box)


def _hop_distances(net: LocalizedNetwork) -> np.ndarray:
    if not net.graph.is_connected():
        raise Disconnected("metrics are defined for connected networks only")
    return all_pairs_distances(net.graph).astype(np.int64)


def _edge_requirements(net: LocalizedNetwork, sub: PlanarSubdivision,
                       dist: np.ndarray) -> tuple[int, int]:
    """Largest hop distance each condition must cover, over all links.

    Returns (req_e, req_g): the smallest k satisfying the consecutive-pair
    condition is req_e, and the smallest k satisfying both it and the
    traversed-owner condition is max(req_e, req_g).
    """
    pos = net.apparent_positions
    req_e = 0
    req_g = 0
    for u, v in net.graph.edges():
        events = walk_segment(sub, pos[u], pos[v])
        for order in (flatten_events(events),
                      flatten_events(list(reversed(events)))):
            for a, b in zip(order, order[1:]):
                req_e = max(req_e, int(dist[a, b]))
        owners = set()
        for ev in events:
            owners.update(ev.owners)
        for w in owners:
            if w != u:
                req_g = max(req_g, int(dist[u, w]))
            if w != v:
                req_g = max(req_g, int(dist[v, w]))
    return req_e, req_g


def delaunay_locality(net: LocalizedNetwork,
                      sub: PlanarSubdivision | None = None) -> int:
    """Largest hop distance between nodes whose cells are Delaunay-adjacent."""
    dist = _hop_distances(net)
    if sub is None:
        sub = _subdivision(net)
    return max((int(dist[u, v]) for u, v in sub.delaunay_edges), default=0)


def embedding_locality(net: LocalizedNetwork,
                       sub: PlanarSubdivision | None = None) -> int:
    """Smallest k with all consecutively traversed cell pairs within k hops."""
    dist = _hop_distances(net)
    if sub is None:
        sub = _subdivision(net)
    req_e, _ = _edge_requirements(net, sub, dist)
    return req_e


def geographic_eccentricity(net: LocalizedNetwork,
                            sub: PlanarSubdivision | None = None) -> int:
    """Smallest k whose canonical simulation embeds every link segment."""
    dist = _hop_distances(net)
    if sub is None:
        sub = _subdivision(net)
    req_e, req_g = _edge_requirements(net, sub, dist)
    return max(req_e, req_g)


def full_report(net: LocalizedNetwork,
                sub: PlanarSubdivision | None = None) -> EccentricityReport:
    dist = _hop_distances(net)
    if sub is None:
        sub = _subdivision(net)
    diameter = int(dist.max())
    k_T = max((int(dist[u, v]) for u, v in sub.delaunay_edges), default=0)
    req_e, req_g = _edge_requirements(net, sub, dist)
    k_e = req_e
    k_g = max(req_e, req_g)
    assert k_e <= k_g <= max(diameter, k_g)

    def n_within(i: int) -> float:
        return float(((dist <= i).sum(axis=1) - 1).mean())

    N = {i: n_within(i) for i in sorted({1, k_e, k_g})}
    return EccentricityReport(
        D=diameter,
        N=N,
        k_T=k_T,
        k_e=k_e,
        k_g=k_g,
        dk=k_g - k_e,
        dN=N[k_g] - N[k_e],
        metadata={
            "box": sub.box,
            "tie_policy": "cells met at a single point are counted",
        },
    )
