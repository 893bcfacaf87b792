"""Canonical-simulation construction and zone-covering tests."""
import pytest

from geoecc.canonical import (
    build_canonical,
    geocast_target,
    handover_target,
    zone_contains,
)
from geoecc.errors import Disconnected, HandoverStuck, PreconditionViolated
from geoecc.netgen import GenParams, SinrModel, generate
from geoecc.netgraph import CommGraph

from nets import hand_net
from oracles import all_pairs_pure, power_graph_pure


def adj_dict(net):
    return {u: list(net.graph.adjacency[u]) for u in range(net.n)}


def test_zones_are_closed_khop_neighborhoods(pocket):
    for k in (1, 2, 3):
        sim = build_canonical(pocket, k)
        want = power_graph_pure(adj_dict(pocket), k)
        for u in range(pocket.n):
            nbrs = {v for a, b in want for v in (a, b)
                    if u in (a, b) and v != u}
            assert sim.zones[u] == frozenset({u} | nbrs)


def test_forbidden_boundaries_complement_khop_edges(pocket):
    sim = build_canonical(pocket, 2)
    dist = all_pairs_pure(adj_dict(pocket))
    for a, b in sim.sub.adjacency:
        if dist[a][b] <= 2:
            assert (a, b) not in sim.forbidden_boundaries
        else:
            assert (a, b) in sim.forbidden_boundaries


def test_pocket_forbidden_boundaries_exact(pocket):
    sim = build_canonical(pocket, 1)
    assert sim.forbidden_boundaries == frozenset({
        (1, 5), (1, 6), (3, 6), (3, 7), (5, 6), (6, 7),
        (8, 9), (9, 10), (9, 11), (9, 12), (9, 14), (9, 15), (9, 16),
        (11, 14), (12, 16)})


def test_forbidden_empty_once_k_covers_all_adjacent_cells(pocket):
    dist = all_pairs_pure(adj_dict(pocket))
    sim1 = build_canonical(pocket, 1)
    need = max(dist[a][b] for a, b in sim1.sub.adjacency)
    assert build_canonical(pocket, need).forbidden_boundaries == frozenset()
    assert build_canonical(pocket, need - 1).forbidden_boundaries != frozenset()


def test_zone_contains_own_and_far_positions(pocket):
    sim = build_canonical(pocket, 1)
    pos = pocket.apparent_positions
    dist = all_pairs_pure(adj_dict(pocket))
    for u in range(pocket.n):
        assert zone_contains(sim, u, (pos[u].x, pos[u].y))
        far = max(range(pocket.n), key=lambda v: dist[u][v])
        assert not zone_contains(sim, u, (pos[far].x, pos[far].y))


def test_zones_cover_everything_off_forbidden_boundaries(pocket):
    # a sample point is in some zone unless it sits on a removed boundary
    sim = build_canonical(pocket, 1)
    box = sim.sub.box
    steps = 23
    on_boundary = 0
    for i in range(steps):
        for j in range(steps):
            x = box.min.x + (box.max.x - box.min.x) * (i + 0.5) / steps
            y = box.min.y + (box.max.y - box.min.y) * (j + 0.5) / steps
            owners = sim.sub.owners(x, y)
            covered = any(zone_contains(sim, w, (x, y)) for w in owners)
            removed = sim.on_forbidden_boundary(owners)
            assert covered == (not removed)
            on_boundary += removed
    assert on_boundary > 0  # the sampling grid does hit removed boundaries


def test_geocast_returns_nearest_known_node(net3):
    sim = build_canonical(net3, 2)
    # point near node 0 inside its cell
    assert geocast_target(sim, 0, (0.1, 0.0)) == 0
    assert geocast_target(sim, 2, (0.1, 0.0)) == 0
    sim_k1 = build_canonical(net3, 1)
    with pytest.raises(PreconditionViolated):
        geocast_target(sim_k1, 0, (0.9, 0.0))  # cell of 1, not in Z_0 at k=1


def test_handover_crossing_into_neighbor_cell(net3):
    sim = build_canonical(net3, 2)
    # leaving node 0's cell rightward at the 0|1 bisector x = 0.5
    assert handover_target(sim, 0, (0.5, 0.0), (1, 0)) == 1
    with pytest.raises(PreconditionViolated):
        handover_target(sim, 0, (0.25, 0.0), (1, 0))  # interior step


def test_handover_stuck_on_forbidden_boundary(net3):
    sim = build_canonical(net3, 1)
    # at k=1, nodes 0 and 1 are not linked, so the 0|1 boundary is a hole
    assert sim.forbidden_boundaries == frozenset({(0, 1)})
    with pytest.raises(HandoverStuck):
        handover_target(sim, 0, (0.5, 0.0), (1, 0))


def test_build_rejects_bad_inputs(net3):
    with pytest.raises(ValueError):
        build_canonical(net3, 0)
    disc = hand_net([(0.0, 0.0), (1.0, 0.0), (5.0, 0.0), (6.0, 0.0)],
                    [(0, 1), (2, 3)])
    with pytest.raises(Disconnected):
        build_canonical(disc, 1)


def test_canonical_on_generated_network():
    net = generate(GenParams(L=2.0, model=SinrModel(1.6, 2.24)), 4)
    sim = build_canonical(net, 2)
    assert set(sim.zones) == set(range(net.n))
    for u in range(net.n):
        assert u in sim.zones[u]
        assert sim.zones[u] == frozenset({u, *sim.H.neighbors(u)})
    for a, b in sim.forbidden_boundaries:
        assert not sim.H.has_edge(a, b)
        assert (a, b) in sim.sub.adjacency
