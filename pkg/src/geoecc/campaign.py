"""Batch measurement campaigns over generated network populations.

A campaign is described by a small text config with one ``[campaign]``
block and one ``[cell]`` block per parameter combination:

    [campaign]
    instances = 30
    seed_base = 1000
    out = results
    measurements = metrics routing protocol
    route_engine = gradient_perimeter
    route_pairs = 50
    protocol_k = kg

    [cell]
    model = sinr
    r = 1.6
    R = 2.24
    L = 3.0
    n = 40
    sigma_err = 0.5

Lines are ``key = value``; ``#`` starts a comment.  Each cell draws
instances with seeds ``seed_base + j`` (j = 0, 1, ...) until the
requested number of connected networks is collected; draws spent on
disconnected attempts are accounted in the Delta column.  Rows are
buffered and written in (cell, instance) order, floats are rendered
with repr(), and reruns of the same config produce byte-identical
files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .canonical import build_canonical
from .distributed import Success, run_full_protocol
from .eccentricity import full_report
from .errors import ConnectivityExhausted, ParseError, ProbeLost
from .navigation import DELIVERED, route
from .netgen import (
    ExponentialModel,
    GenParams,
    Model,
    RandomModel,
    SinrModel,
    generate,
)

METRICS_HEADER = ("net_id,seed,model,r,R,p,r_avg,L,n,sigma_err,"
                  "D,N1,kT,ke,kg,dk,dN,Nke,Nkg,sigma_total,delta_discarded")
_SUMMARY_METRICS = ("D", "N1", "kT", "ke", "kg", "dk", "dN", "Nke", "Nkg")
SUMMARY_HEADER = ("cell,model,r,R,p,r_avg,L,n,sigma_err,instances,"
                  + ",".join(f"mean_{m},sd_{m}" for m in _SUMMARY_METRICS)
                  + ",Sigma,Delta")
ROUTING_HEADER = ("net_id,seed,k,engine,pairs,delivered,delivery_rate,"
                  "mean_stretch,max_stretch,dead_ends")
PROTOCOL_HEADER = ("net_id,seed,k,verdict,cause,rounds,delaunay_msgs,"
                   "probe_msgs,probe_dedup_msgs,zone_msgs,total_msgs")

DESK_INSTANCES = 30
PAPER_INSTANCES = 100


@dataclass(frozen=True)
class CellSpec:
    """One parameter combination of the sweep."""

    model: Model
    L: float
    n: int | None = None
    sigma_err: float = 0.0
    max_apparent_range: float | None = None
    max_attempts: int = 1000

    def gen_params(self) -> GenParams:
        return GenParams(L=self.L, model=self.model, n=self.n,
                         sigma_err=self.sigma_err,
                         max_apparent_range=self.max_apparent_range,
                         max_attempts=self.max_attempts)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated campaign description."""

    cells: tuple[CellSpec, ...]
    instances_required: int = DESK_INSTANCES
    seed_base: int = 0
    measurements: tuple[str, ...] = ("metrics",)
    out_dir: Path = Path("results")
    route_engine: str = "gradient_perimeter"
    route_pairs: int = 50
    route_k: int | None = None
    protocol_k: int | None = None

    def __post_init__(self):
        if not self.cells:
            raise ParseError("campaign sweep is empty: no [cell] blocks")
        if self.instances_required < 1:
            raise ParseError("instances must be >= 1")
        bad = set(self.measurements) - {"metrics", "routing", "protocol"}
        if bad:
            raise ParseError(f"unknown measurements: {sorted(bad)}")


@dataclass
class CampaignResult:
    """All rows of a finished (or interrupted) campaign, in order."""

    metrics_rows: list[str] = field(default_factory=list)
    summary_rows: list[str] = field(default_factory=list)
    routing_rows: list[str] = field(default_factory=list)
    protocol_rows: list[str] = field(default_factory=list)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _model_fields(model: Model) -> tuple:
    r = R = p = r_avg = None
    if isinstance(model, SinrModel):
        r, R = model.r, model.R
    elif isinstance(model, RandomModel):
        p = model.p
    elif isinstance(model, ExponentialModel):
        r_avg = model.r_avg
    return model.name, r, R, p, r_avg


# ---------------------------------------------------------------------------
# config parsing


_CAMPAIGN_KEYS = {"instances", "seed_base", "out", "measurements",
                  "route_engine", "route_pairs", "route_k", "protocol_k"}
_CELL_KEYS = {"model", "r", "R", "p", "r_avg", "L", "n", "sigma_err",
              "max_apparent_range", "max_attempts"}


def _build_cell(kv: dict[str, str], line_no: int) -> CellSpec:
    def fval(key):
        try:
            return float(kv[key])
        except KeyError:
            raise ParseError(f"[cell] before line {line_no}: "
                             f"missing key {key!r}") from None
        except ValueError:
            raise ParseError(f"[cell] before line {line_no}: "
                             f"bad float for {key!r}") from None

    name = kv.get("model")
    if name == "sinr":
        model: Model = SinrModel(r=fval("r"), R=fval("R"))
    elif name == "random":
        model = RandomModel(p=fval("p"))
    elif name == "exponential":
        model = ExponentialModel(r_avg=fval("r_avg"))
    else:
        raise ParseError(f"[cell] before line {line_no}: model must be "
                         f"sinr, random, or exponential, got {name!r}")
    rng = kv.get("max_apparent_range")
    try:
        return CellSpec(
            model=model,
            L=fval("L"),
            n=int(kv["n"]) if "n" in kv else None,
            sigma_err=float(kv.get("sigma_err", "0")),
            max_apparent_range=None if rng in (None, "none") else float(rng),
            max_attempts=int(kv.get("max_attempts", "1000")),
        )
    except ValueError as exc:
        raise ParseError(f"[cell] before line {line_no}: {exc}") from None


def parse_config(path, *, paper_scale: bool = False) -> ExperimentConfig:
    """Read a campaign config file; raise ParseError on any defect."""
    text = Path(path).read_text()
    campaign: dict[str, str] = {}
    cells: list[CellSpec] = []
    section: str | None = None
    cell_kv: dict[str, str] = {}

    def close_cell(line_no):
        if section == "cell":
            cells.append(_build_cell(cell_kv, line_no))

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line == "[campaign]":
                close_cell(line_no)
                section = "campaign"
            elif line == "[cell]":
                close_cell(line_no)
                section = "cell"
                cell_kv = {}
            else:
                raise ParseError(f"line {line_no}: unknown section {line}")
            continue
        if "=" not in line:
            raise ParseError(f"line {line_no}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if section == "campaign":
            if key not in _CAMPAIGN_KEYS:
                raise ParseError(f"line {line_no}: unknown campaign key "
                                 f"{key!r}")
            campaign[key] = value
        elif section == "cell":
            if key not in _CELL_KEYS:
                raise ParseError(f"line {line_no}: unknown cell key {key!r}")
            cell_kv[key] = value
        else:
            raise ParseError(f"line {line_no}: key outside any section")
    close_cell(len(text.splitlines()) + 1)

    default_instances = PAPER_INSTANCES if paper_scale else DESK_INSTANCES
    measurements = tuple(campaign.get("measurements", "metrics").split())

    def opt_k(key):
        value = campaign.get(key)
        if value is None or value == "kg":
            return None
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"campaign key {key!r} must be an integer "
                             f"or kg") from None

    try:
        return ExperimentConfig(
            cells=tuple(cells),
            instances_required=int(campaign.get("instances",
                                                default_instances)),
            seed_base=int(campaign.get("seed_base", "0")),
            measurements=measurements,
            out_dir=Path(campaign.get("out", "results")),
            route_engine=campaign.get("route_engine", "gradient_perimeter"),
            route_pairs=int(campaign.get("route_pairs", "50")),
            route_k=opt_k("route_k"),
            protocol_k=opt_k("protocol_k"),
        )
    except ValueError as exc:
        raise ParseError(f"campaign block: {exc}") from None


# ---------------------------------------------------------------------------
# measurement

def _collect_instances(spec: CellSpec, seed_base: int, count: int):
    """Collect the first `count` connected draws as (seed, net) pairs.

    Also returns the number of discarded draws, including a full
    max_attempts charge for every exhausted seed.
    """
    params = spec.gen_params()
    collected = 0
    discarded = 0
    offset = 0
    nets = []
    while collected < count:
        seed = seed_base + offset
        offset += 1
        try:
            net = generate(params, seed)
        except ConnectivityExhausted:
            discarded += params.max_attempts
            continue
        discarded += net.discarded_attempts
        nets.append((seed, net))
        collected += 1
    return nets, discarded


def _route_row(net_id, seed, net, rep, config: ExperimentConfig) -> str:
    k = config.route_k if config.route_k is not None else rep.k_g
    sim = build_canonical(net, k)
    n = net.n
    all_pairs = [(s, t) for s in range(n) for t in range(n) if s != t]
    if 0 < config.route_pairs < len(all_pairs):
        rng = np.random.default_rng((seed, 9001))
        idx = rng.choice(len(all_pairs), size=config.route_pairs,
                         replace=False)
        pairs = [all_pairs[i] for i in sorted(idx)]
    else:
        pairs = all_pairs
    delivered = 0
    dead_ends = 0
    stretches = []
    for s, t in pairs:
        trace = route(sim, config.route_engine, s, t)
        if trace.outcome == DELIVERED:
            delivered += 1
            if math.isfinite(trace.stretch):
                stretches.append(trace.stretch)
        else:
            dead_ends += 1
    rate = delivered / len(pairs)
    mean_st = sum(stretches) / len(stretches) if stretches else None
    max_st = max(stretches) if stretches else None
    return ",".join(_fmt(x) for x in (
        net_id, seed, k, config.route_engine, len(pairs), delivered,
        float(rate), mean_st, max_st, dead_ends))


def _protocol_row(net_id, seed, net, rep, config: ExperimentConfig) -> str:
    k = config.protocol_k if config.protocol_k is not None else rep.k_g
    try:
        run = run_full_protocol(net, k)
    except ProbeLost:
        return ",".join(_fmt(x) for x in (
            net_id, seed, k, "failure", "probe lost", None,
            None, None, None, None, None))
    if isinstance(run.verdict, Success):
        verdict, cause = "success", None
    else:
        verdict, cause = "failure", run.verdict.cause.value
    m = run.messages_sent
    return ",".join(_fmt(x) for x in (
        net_id, seed, k, verdict, cause, run.rounds, m.delaunay,
        m.probe, m.probe_dedup, m.zone, m.total))


def _metrics_row(net_id, seed, spec: CellSpec, net, rep) -> str:
    name, r, R, p, r_avg = _model_fields(spec.model)
    return ",".join(_fmt(x) for x in (
        net_id, seed, name, r, R, p, r_avg, spec.L, net.n, spec.sigma_err,
        rep.D, rep.N[1], rep.k_T, rep.k_e, rep.k_g, rep.dk, rep.dN,
        rep.N[rep.k_e], rep.N[rep.k_g],
        1 + net.discarded_attempts, net.discarded_attempts))


def _summary_row(cell_idx, spec: CellSpec, n: int, reports,
                 sigma_total, delta) -> str:
    name, r, R, p, r_avg = _model_fields(spec.model)
    values = {
        "D": [rep.D for rep in reports],
        "N1": [rep.N[1] for rep in reports],
        "kT": [rep.k_T for rep in reports],
        "ke": [rep.k_e for rep in reports],
        "kg": [rep.k_g for rep in reports],
        "dk": [rep.dk for rep in reports],
        "dN": [rep.dN for rep in reports],
        "Nke": [rep.N[rep.k_e] for rep in reports],
        "Nkg": [rep.N[rep.k_g] for rep in reports],
    }
    cols = [f"c{cell_idx}", name, _fmt(r), _fmt(R), _fmt(p), _fmt(r_avg),
            _fmt(spec.L), str(n), _fmt(spec.sigma_err),
            str(len(reports))]
    for m in _SUMMARY_METRICS:
        arr = np.asarray(values[m], dtype=float)
        cols.append(repr(float(arr.mean())))
        cols.append(repr(float(arr.std(ddof=0))))
    cols.append(str(sigma_total))
    cols.append(str(delta))
    return ",".join(cols)


def run_campaign(config: ExperimentConfig,
                 result: CampaignResult | None = None) -> CampaignResult:
    """Execute every cell and return all CSV rows in deterministic order.

    Rows accumulate in `result` as instances finish, so a caller that
    passes its own CampaignResult still holds every completed row if an
    interrupt lands mid-campaign and can flush a valid prefix.
    """
    if result is None:
        result = CampaignResult()
    for cell_idx, spec in enumerate(config.cells):
        nets, delta = _collect_instances(
            spec, config.seed_base, config.instances_required)
        reports = []
        for inst_idx, (seed, net) in enumerate(nets):
            net_id = f"c{cell_idx}i{inst_idx}"
            rep = full_report(net)
            reports.append(rep)
            result.metrics_rows.append(
                _metrics_row(net_id, seed, spec, net, rep))
            if "routing" in config.measurements:
                result.routing_rows.append(
                    _route_row(net_id, seed, net, rep, config))
            if "protocol" in config.measurements:
                result.protocol_rows.append(
                    _protocol_row(net_id, seed, net, rep, config))
        sigma_total = config.instances_required + delta
        result.summary_rows.append(
            _summary_row(cell_idx, spec, nets[0][1].n, reports,
                         sigma_total, delta))
    return result


def write_outputs(result: CampaignResult, config: ExperimentConfig) -> list:
    """Write the CSV files for `result` under the config's out dir."""
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def dump(name, header, rows):
        path = out / name
        path.write_text("\n".join([header, *rows]) + "\n")
        written.append(path)

    dump("metrics.csv", METRICS_HEADER, result.metrics_rows)
    dump("summary.csv", SUMMARY_HEADER, result.summary_rows)
    if "routing" in config.measurements:
        dump("routing.csv", ROUTING_HEADER, result.routing_rows)
    if "protocol" in config.measurements:
        dump("protocol.csv", PROTOCOL_HEADER, result.protocol_rows)
    return written
