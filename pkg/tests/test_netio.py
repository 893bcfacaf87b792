"""Network file round-trip and parse-error tests."""
import pytest

from geoecc.errors import ParseError
from geoecc.netgen import (
    ExponentialModel,
    GenParams,
    RandomModel,
    SinrModel,
    generate,
)
from geoecc.netio import load_network, save_network

from nets import three_collinear


PARAMS = [
    GenParams(L=2.0, model=SinrModel(1.6, 2.24), sigma_err=0.5),
    GenParams(L=2.0, model=RandomModel(0.4)),
    GenParams(L=2.0, model=ExponentialModel(1.2), n=20,
              max_apparent_range=3.0),
]


@pytest.mark.parametrize("params", PARAMS, ids=lambda p: p.model.name)
def test_round_trip_exact(tmp_path, params):
    net = generate(params, 9)
    path = tmp_path / "net.txt"
    save_network(net, path)
    back = load_network(path)
    assert back.true_positions == net.true_positions
    assert back.apparent_positions == net.apparent_positions
    assert set(back.graph.edges()) == set(net.graph.edges())
    assert back.seed == net.seed
    assert back.discarded_attempts == net.discarded_attempts
    gp = back.gen_params
    assert gp.L == params.L
    assert gp.n == params.n
    assert gp.sigma_err == params.sigma_err
    assert gp.max_apparent_range == params.max_apparent_range
    assert type(gp.model) is type(params.model)


def test_round_trip_handbuilt(tmp_path):
    net = three_collinear()
    path = tmp_path / "tri.txt"
    save_network(net, path)
    back = load_network(path)
    assert back.gen_params is None
    assert back.true_positions == net.true_positions
    assert set(back.graph.edges()) == set(net.graph.edges())
    assert "model=none" in path.read_text()


def test_save_load_save_byte_identical(tmp_path):
    net = generate(PARAMS[0], 21)
    p1 = tmp_path / "a.txt"
    p2 = tmp_path / "b.txt"
    save_network(net, p1)
    save_network(load_network(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_header_line_checked(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("geoecc-net v2\nparams model=none n=1 seed=0 discarded=0\n"
                    "node 0 0.0 0.0 0.0 0.0\n")
    with pytest.raises(ParseError) as exc:
        load_network(path)
    assert exc.value.line_no == 1


def test_unknown_record_reports_line(tmp_path):
    net = three_collinear()
    path = tmp_path / "bad.txt"
    save_network(net, path)
    lines = path.read_text().splitlines()
    lines.insert(3, "bogus 1 2 3")
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError) as exc:
        load_network(path)
    assert exc.value.line_no == 4
    assert "bogus" in str(exc.value)


def test_bad_float_reports_line(tmp_path):
    net = three_collinear()
    path = tmp_path / "bad.txt"
    save_network(net, path)
    text = path.read_text().replace("node 1 1.0", "node 1 one.0")
    path.write_text(text)
    with pytest.raises(ParseError):
        load_network(path)


def test_edge_with_unknown_node_rejected(tmp_path):
    net = three_collinear()
    path = tmp_path / "bad.txt"
    save_network(net, path)
    path.write_text(path.read_text() + "edge 0 99\n")
    with pytest.raises(ParseError):
        load_network(path)


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        load_network(tmp_path / "nope.txt")
