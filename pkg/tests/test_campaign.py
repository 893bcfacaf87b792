"""Campaign config parsing, row schemas, and byte-determinism."""
import pytest

from geoecc.campaign import (
    METRICS_HEADER,
    PROTOCOL_HEADER,
    ROUTING_HEADER,
    SUMMARY_HEADER,
    CampaignResult,
    CellSpec,
    ExperimentConfig,
    parse_config,
    run_campaign,
    write_outputs,
)
from geoecc.errors import ParseError


GOOD_CONFIG = """\
# two cells, tiny run
[campaign]
instances = 2
seed_base = 100
measurements = metrics protocol
protocol_k = kg

[cell]
model = sinr
r = 1.6
R = 2.24
L = 2.0
n = 20

[cell]
model = sinr
r = 1.6
R = 2.24
L = 2.0
n = 20
sigma_err = 0.5
"""


def write_cfg(tmp_path, text):
    p = tmp_path / "c.cfg"
    p.write_text(text)
    return p


def test_parse_config_round_trip(tmp_path):
    cfg = parse_config(write_cfg(tmp_path, GOOD_CONFIG))
    assert cfg.instances_required == 2
    assert cfg.seed_base == 100
    assert cfg.measurements == ("metrics", "protocol")
    assert len(cfg.cells) == 2
    assert cfg.cells[0].n == 20
    assert cfg.cells[1].sigma_err == 0.5
    assert cfg.protocol_k is None  # "kg" means per-instance k_g


def test_parse_config_paper_scale_default_instances(tmp_path):
    text = "[campaign]\n[cell]\nmodel = random\np = 0.3\nL = 2.0\n"
    desk = parse_config(write_cfg(tmp_path, text))
    paper = parse_config(write_cfg(tmp_path, text), paper_scale=True)
    assert desk.instances_required == 30
    assert paper.instances_required == 100


def test_parse_config_rejects_empty_sweep(tmp_path):
    with pytest.raises(ParseError):
        parse_config(write_cfg(tmp_path, "[campaign]\ninstances = 5\n"))


def test_parse_config_rejects_unknown_key(tmp_path):
    bad = GOOD_CONFIG.replace("seed_base", "sede_base")
    with pytest.raises(ParseError) as exc:
        parse_config(write_cfg(tmp_path, bad))
    assert "sede_base" in str(exc.value)


def test_parse_config_rejects_bad_measurement(tmp_path):
    bad = GOOD_CONFIG.replace("metrics protocol", "metrics plots")
    with pytest.raises(ParseError):
        parse_config(write_cfg(tmp_path, bad))


def test_parse_config_rejects_incomplete_model(tmp_path):
    text = "[campaign]\n[cell]\nmodel = sinr\nr = 1.0\nL = 2.0\n"
    with pytest.raises(ParseError):
        parse_config(write_cfg(tmp_path, text))


def test_config_validation_direct():
    cell = CellSpec(model="sinr", L=2.0, n=20)
    with pytest.raises(ParseError):
        ExperimentConfig(cells=(), instances_required=2)
    with pytest.raises(ParseError):
        ExperimentConfig(cells=(cell,), instances_required=0)
    with pytest.raises(ParseError):
        ExperimentConfig(cells=(cell,), measurements=("plots",))


def fresh_result(tmp_path, text=GOOD_CONFIG):
    cfg = parse_config(write_cfg(tmp_path, text))
    return cfg, run_campaign(cfg)


def test_row_counts_and_headers(tmp_path):
    cfg, result = fresh_result(tmp_path)
    assert len(result.metrics_rows) == 4  # 2 cells x 2 instances
    assert len(result.summary_rows) == 2
    assert len(result.protocol_rows) == 4
    assert result.routing_rows == []
    for row in result.metrics_rows:
        assert len(row.split(",")) == len(METRICS_HEADER.split(","))
    for row in result.summary_rows:
        assert len(row.split(",")) == len(SUMMARY_HEADER.split(","))
    for row in result.protocol_rows:
        assert len(row.split(",")) == len(PROTOCOL_HEADER.split(","))


def test_metrics_rows_in_cell_instance_order(tmp_path):
    _, result = fresh_result(tmp_path)
    ids = [row.split(",")[0] for row in result.metrics_rows]
    assert ids == ["c0i0", "c0i1", "c1i0", "c1i1"]
    seeds = [int(row.split(",")[1]) for row in result.metrics_rows]
    assert all(s >= 100 for s in seeds)


def test_sigma_accounting(tmp_path):
    cfg, result = fresh_result(tmp_path)
    for row in result.summary_rows:
        cols = row.split(",")
        sigma = int(cols[-2])
        delta = int(cols[-1])
        assert sigma == cfg.instances_required + delta
    # per-row sigma_total = 1 + that instance's discarded draws
    for row in result.metrics_rows:
        cols = row.split(",")
        assert int(cols[-2]) == 1 + int(cols[-1])


def test_outputs_byte_identical_across_reruns(tmp_path):
    import dataclasses
    cfg = parse_config(write_cfg(tmp_path, GOOD_CONFIG))
    cfg_a = dataclasses.replace(cfg, out_dir=tmp_path / "a")
    cfg_b = dataclasses.replace(cfg, out_dir=tmp_path / "b")
    paths_a = write_outputs(run_campaign(cfg_a), cfg_a)
    paths_b = write_outputs(run_campaign(cfg_b), cfg_b)
    assert [p.name for p in paths_a] == [p.name for p in paths_b]
    assert {p.name for p in paths_a} == {"metrics.csv", "summary.csv",
                                         "protocol.csv"}
    for pa, pb in zip(paths_a, paths_b):
        assert pa.read_bytes() == pb.read_bytes()
    metrics = (tmp_path / "a" / "metrics.csv").read_text().splitlines()
    assert metrics[0] == METRICS_HEADER
    assert len(metrics) == 5


def test_routing_measurement(tmp_path):
    text = GOOD_CONFIG.replace("measurements = metrics protocol",
                               "measurements = metrics routing\n"
                               "route_pairs = 10")
    cfg, result = fresh_result(tmp_path, text)
    assert len(result.routing_rows) == 4
    for row in result.routing_rows:
        cols = row.split(",")
        assert len(cols) == len(ROUTING_HEADER.split(","))
        assert cols[3] == "gradient_perimeter"
        assert int(cols[4]) == 10
        assert 0.0 <= float(cols[6]) <= 1.0


def test_partial_result_survives_interrupt(tmp_path):
    # run_campaign fills a caller-owned result, so an interrupt mid-run
    # leaves a valid prefix behind
    cfg = parse_config(write_cfg(tmp_path, GOOD_CONFIG))
    result = CampaignResult()
    out = run_campaign(cfg, result=result)
    assert out is result
    assert len(result.metrics_rows) == 4
