"""Eccentricity metrics against hand-computed fixtures and brute checkers."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geoecc.eccentricity import full_report
from geoecc.geometry import Point2
from geoecc.netgen import (
    ExponentialModel,
    GenParams,
    RandomModel,
    SinrModel,
    generate,
)

from nets import hand_net, pocket_net
from oracles import brute_ke_kg, condition_tables


def random_bank(count: int):
    """Connected generated nets across all three link models."""
    specs = [
        GenParams(L=2.0, model=SinrModel(1.6, 2.24), sigma_err=0.5),
        GenParams(L=2.0, model=ExponentialModel(0.9)),
        GenParams(L=2.0, n=25, model=RandomModel(0.25)),
    ]
    nets = []
    seed = 0
    while len(nets) < count:
        nets.append(generate(specs[seed % 3], seed))
        seed += 1
    return nets


def test_three_collinear_exact(net3):
    rep = full_report(net3)
    assert rep.D == 2
    assert rep.k_T == 2
    assert rep.k_e == 2
    assert rep.k_g == 2
    assert rep.dk == 0
    assert rep.dN == 0.0
    assert rep.N[1] == pytest.approx(4.0 / 3.0)
    assert rep.N[2] == pytest.approx(2.0)


def test_complete_k5_exact(k5):
    rep = full_report(k5)
    assert rep.D == 1
    assert rep.k_T == 1
    assert rep.k_e == 1
    assert rep.k_g == 1
    assert rep.N[1] == pytest.approx(4.0)


def test_pocket_grid_local_metrics_far_below_diameter(pocket):
    rep = full_report(pocket)
    assert rep.D == 10
    assert rep.k_T == 10
    assert rep.k_e == 1
    assert rep.k_g == 1
    assert rep.dk == 0


def test_shortcut_chain_separates_ke_from_kg():
    # a straight chain with one long chord: the chord's segment passes
    # through every intermediate cell, while boundary crossings join
    # consecutive chain nodes only
    pts = [(float(i), 0.0) for i in range(5)]
    edges = [(i, i + 1) for i in range(4)] + [(0, 4)]
    rep = full_report(hand_net(pts, edges))
    assert rep.D == 1 + 1  # dist(1, 3) = 2 via either neighbor
    assert rep.k_e == 1
    assert rep.k_g == 2
    assert rep.dk == 1
    assert rep.dN > 0.0


@pytest.mark.parametrize("idx", range(25))
def test_matches_bruteforce_checker(idx):
    net = random_bank(25)[idx]
    rep = full_report(net)
    ke, kg = brute_ke_kg(net)
    assert rep.k_e == ke
    assert rep.k_g == kg


def test_condition_tables_consistent():
    net = random_bank(3)[2]
    rep = full_report(net)
    cond_e, cond_g = condition_tables(net)
    for k in range(1, rep.D + 1):
        assert cond_e[k] == (k >= rep.k_e)
        assert (cond_e[k] and cond_g[k]) == (k >= rep.k_g)


def test_ke_le_kg_across_bank():
    for net in random_bank(12):
        rep = full_report(net)
        assert 1 <= rep.k_e <= rep.k_g
        assert rep.k_g <= max(rep.D, 1)
        assert rep.dk == rep.k_g - rep.k_e
        assert rep.dN == pytest.approx(rep.N[rep.k_g] - rep.N[rep.k_e])


def test_neighborhood_sizes_monotone():
    net = random_bank(1)[0]
    rep = full_report(net)
    keys = sorted(rep.N)
    vals = [rep.N[k] for k in keys]
    assert vals == sorted(vals)
    assert keys[0] == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(-6, 6))
def test_scale_invariance(exponent):
    net = random_bank(1)[0]
    rep = full_report(net)
    s = 2.0 ** exponent
    scaled = hand_net(
        [(p.x * s, p.y * s) for p in net.true_positions],
        list(net.graph.edges()),
    )
    rep2 = full_report(scaled)
    assert (rep2.D, rep2.k_T, rep2.k_e, rep2.k_g) == (
        rep.D, rep.k_T, rep.k_e, rep.k_g)


def test_metadata_records_box_and_ties():
    rep = full_report(random_bank(1)[0])
    assert "box" in rep.metadata
    assert "tie_policy" in rep.metadata
