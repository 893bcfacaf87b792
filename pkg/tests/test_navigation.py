"""Routing-engine tests: exact small fixtures, lattices, generated nets."""
import math

import pytest

from geoecc.canonical import build_canonical
from geoecc.eccentricity import full_report
from geoecc.geometry import Point2
from geoecc.navigation import (
    ARRIVED,
    DEAD_END,
    DELIVERED,
    HOP_CAP_EXCEEDED,
    route,
)
from geoecc.netgen import GenParams, SinrModel, generate

from nets import unit_grid_net


def test_gradient_dead_end_at_slit(net3):
    sim = build_canonical(net3, 1)
    assert set(sim.forbidden_boundaries) == {(0, 1)}
    tr = route(sim, "gradient", 0, 1)
    assert tr.outcome == DEAD_END
    assert tr.dead_point == Point2(0.5, 0.0)
    assert tr.hops[0] == 0
    assert tr.hop_count == len(tr.hops) - 1


def test_gradient_direct_delivery(net3):
    sim = build_canonical(net3, 1)
    tr = route(sim, "gradient", 0, 2)
    assert tr.outcome == DELIVERED
    assert tr.hops == [0, 2]
    assert tr.hop_count == 1
    assert tr.stretch == 1.0


def test_perimeter_cannot_escape_sealed_chamber(net3):
    # the forbidden slit plus the box wall close off the source chamber
    sim = build_canonical(net3, 1)
    assert route(sim, "gradient_perimeter", 0, 1).outcome == DEAD_END
    assert route(sim, "gradient_perimeter", 1, 0).outcome == DEAD_END


def test_all_pairs_delivered_at_kg(net3):
    rep = full_report(net3)
    assert rep.k_g == 2
    sim = build_canonical(net3, 2)
    for s in range(3):
        for t in range(3):
            if s == t:
                continue
            for eng in ("gradient", "gradient_perimeter"):
                assert route(sim, eng, s, t).outcome == DELIVERED


def test_source_equals_dest_zero_hops(net3):
    sim = build_canonical(net3, 2)
    tr = route(sim, "gradient", 1, 1)
    assert tr.outcome == DELIVERED
    assert tr.hops == [1]
    assert tr.hop_count == 0


def test_trajectory_and_events_consistent(net3):
    sim = build_canonical(net3, 2)
    tr = route(sim, "gradient_perimeter", 0, 1)
    assert tr.outcome == DELIVERED
    assert tr.trajectory[0] == sim.net.apparent_positions[0]
    assert tr.trajectory[-1] == sim.net.apparent_positions[1]
    for node, point, kind in tr.hop_events:
        assert isinstance(node, int)
        assert isinstance(point, Point2)
        assert isinstance(kind, str) and kind
    assert {ev[2] for ev in tr.hop_events} >= {ARRIVED}
    # holder hops ride k-hop links, so stretch may dip below 1
    assert math.isfinite(tr.stretch) and tr.stretch > 0.0


def test_pocket_perimeter_routes_around(pocket):
    rep = full_report(pocket)
    assert (rep.D, rep.k_e, rep.k_g, rep.k_T) == (10, 1, 1, 10)
    sim = build_canonical(pocket, 1)
    n = pocket.n
    worst = 0.0
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            tr = route(sim, "gradient_perimeter", s, t)
            assert tr.outcome == DELIVERED, (s, t, tr.outcome)
            worst = max(worst, tr.stretch)
    assert worst > 1.5  # detours around the pocket are real


def test_pocket_gradient_alone_gets_stuck(pocket):
    sim = build_canonical(pocket, 1)
    outcomes = {route(sim, "gradient", s, t).outcome
                for s in range(pocket.n) for t in range(pocket.n) if s != t}
    assert DEAD_END in outcomes


def test_full_grid_engines_agree():
    net = unit_grid_net(5, 5)
    sim = build_canonical(net, 1)
    assert not sim.forbidden_boundaries
    for s in range(25):
        for t in range(25):
            if s == t:
                continue
            r1 = route(sim, "gradient", s, t)
            r2 = route(sim, "gradient_perimeter", s, t)
            assert r1.outcome == r2.outcome == DELIVERED
            assert r1.hops == r2.hops


def test_hop_cap_limits_route(pocket):
    # the walk stops at the first hop past the cap
    sim = build_canonical(pocket, 1)
    tr = route(sim, "gradient_perimeter", 0, pocket.n - 1, hop_cap=1)
    assert tr.outcome == HOP_CAP_EXCEEDED
    assert tr.hop_count == 2


def test_unknown_engine_rejected(net3):
    sim = build_canonical(net3, 2)
    with pytest.raises(ValueError):
        route(sim, "compass", 0, 1)


@pytest.mark.parametrize("seed", range(3))
def test_generated_net_all_pairs_at_kg(seed):
    params = GenParams(L=3.0, n=40, model=SinrModel(1.6, 2.24), sigma_err=0.5)
    net = generate(params, seed)
    rep = full_report(net)
    sim = build_canonical(net, rep.k_g)
    for s in range(net.n):
        for t in range(net.n):
            if s != t:
                assert route(sim, "gradient_perimeter", s, t).outcome == \
                    DELIVERED, (seed, s, t)
