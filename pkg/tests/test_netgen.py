"""Network generator tests: determinism, models, error injection."""
import math

import pytest

from geoecc.errors import ConnectivityExhausted
from geoecc.netgen import (
    ExponentialModel,
    GenParams,
    RandomModel,
    SinrModel,
    generate,
    link_probability,
    remove_long_links,
)


DENSE = GenParams(L=2.0, model=SinrModel(1.6, 2.24))


def test_default_node_count_matches_density_one():
    assert GenParams(L=3.0, model=RandomModel(0.5)).n == 36
    assert GenParams(L=2.5, model=RandomModel(0.5)).n == 25
    assert GenParams(L=3.0, model=RandomModel(0.5), n=10).n == 10


def test_generate_is_deterministic():
    a = generate(DENSE, 42)
    b = generate(DENSE, 42)
    assert a.true_positions == b.true_positions
    assert a.apparent_positions == b.apparent_positions
    assert set(a.graph.edges()) == set(b.graph.edges())
    assert a.discarded_attempts == b.discarded_attempts
    c = generate(DENSE, 43)
    assert c.true_positions != a.true_positions


def test_generate_returns_connected():
    for seed in range(5):
        net = generate(DENSE, seed)
        assert net.graph.is_connected()
        assert net.n == DENSE.n


def test_zero_error_means_apparent_equals_true():
    net = generate(DENSE, 7)
    assert net.apparent_positions == net.true_positions


def test_positive_error_perturbs_positions():
    params = GenParams(L=2.0, model=SinrModel(1.6, 2.24), sigma_err=0.5)
    net = generate(params, 7)
    assert net.apparent_positions != net.true_positions
    disp = [math.hypot(a.x - t.x, a.y - t.y)
            for a, t in zip(net.apparent_positions, net.true_positions)]
    mean = sum(disp) / len(disp)
    # signed-radius normal error: mean displacement near sigma * sqrt(2/pi)
    assert 0.1 < mean < 1.5


def test_deployment_rect_is_4L_by_L():
    net = generate(DENSE, 3)
    rect = net.deployment_rect()
    assert rect[1].x - rect[0].x == pytest.approx(4 * DENSE.L)
    assert rect[1].y - rect[0].y == pytest.approx(DENSE.L)
    for p in net.true_positions:
        assert rect[0].x <= p.x <= rect[1].x
        assert rect[0].y <= p.y <= rect[1].y


def test_random_model_probability_constant():
    m = RandomModel(0.3)
    assert m.name == "random"
    for d in (0.0, 1.0, 100.0):
        assert link_probability(m, d) == pytest.approx(0.3)


def test_sinr_model_probability_shape():
    m = SinrModel(1.0, 2.0)
    assert m.name == "sinr"
    assert link_probability(m, 0.5) == 1.0
    assert link_probability(m, 1.0) == 1.0
    assert link_probability(m, 2.0) == 0.0
    assert link_probability(m, 5.0) == 0.0
    mid = [link_probability(m, d) for d in (1.2, 1.5, 1.8)]
    assert all(0.0 < p < 1.0 for p in mid)
    assert mid == sorted(mid, reverse=True)
    # interpolation in inverse-square signal strength
    expect = (1 / 1.5 ** 2 - 1 / 4) / (1 - 1 / 4)
    assert link_probability(m, 1.5) == pytest.approx(expect)


def test_exponential_model_probability_shape():
    m = ExponentialModel(2.0)
    assert m.name == "exponential"
    assert link_probability(m, 0.0) == 1.0
    assert link_probability(m, 2.0) == pytest.approx(math.exp(-1))
    vals = [link_probability(m, d) for d in (0.5, 1.0, 4.0, 9.0)]
    assert vals == sorted(vals, reverse=True)


def test_link_probability_rejects_negative_distance():
    with pytest.raises(ValueError):
        link_probability(RandomModel(0.5), -1.0)


def test_remove_long_links():
    net = generate(GenParams(L=2.0, model=RandomModel(0.9)), 5)
    ap = net.apparent_positions
    bound = 2.0
    trimmed = remove_long_links(net, bound)
    kept = set(trimmed.graph.edges())
    for u, v in net.graph.edges():
        d = math.hypot(ap[u].x - ap[v].x, ap[u].y - ap[v].y)
        assert ((u, v) in kept) == (d <= bound)
    with pytest.raises(ValueError):
        remove_long_links(net, 0.0)


def test_max_apparent_range_enforced_in_generate():
    params = GenParams(L=2.0, model=RandomModel(0.9), max_apparent_range=2.5)
    net = generate(params, 11)
    ap = net.apparent_positions
    for u, v in net.graph.edges():
        assert math.hypot(ap[u].x - ap[v].x, ap[u].y - ap[v].y) <= 2.5
    assert net.graph.is_connected()


def test_discarded_attempts_counted():
    # sparse random graphs frequently disconnect, forcing retries
    params = GenParams(L=2.0, n=30, model=RandomModel(0.12))
    seen_discard = False
    for seed in range(12):
        net = generate(params, seed)
        assert net.graph.is_connected()
        if net.discarded_attempts > 0:
            seen_discard = True
    assert seen_discard


def test_connectivity_exhausted():
    params = GenParams(L=2.0, n=20, model=RandomModel(0.001), max_attempts=3)
    with pytest.raises(ConnectivityExhausted):
        generate(params, 0)
