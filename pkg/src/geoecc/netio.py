"""Line-oriented text format for localized networks (geoecc-net v1).

Layout:

    geoecc-net v1
    params model=sinr r=1.0 R=2.0 L=10.0 n=400 sigma_err=0.0 \
           max_apparent_range=none max_attempts=1000 seed=7 discarded=0
    node <id> <true_x> <true_y> <apparent_x> <apparent_y>
    edge <u> <v>

Floats are written with repr(), the shortest decimal that round-trips
exactly, so save/load is lossless.  Hand-built networks with no generation
parameters use model=none and omit the model keys.
"""
from __future__ import annotations

from .errors import ParseError
from .geometry import Point2
from .netgen import (
    ExponentialModel,
    GenParams,
    LocalizedNetwork,
    RandomModel,
    SinrModel,
)
from .netgraph import CommGraph

_HEADER = "geoecc-net v1"


def _params_line(net: LocalizedNetwork) -> str:
    gp = net.gen_params
    parts = []
    if gp is None:
        parts.append("model=none")
        parts.append(f"n={net.graph.n}")
    else:
        m = gp.model
        parts.append(f"model={m.name}")
        if isinstance(m, RandomModel):
            parts.append(f"p={m.p!r}")
        elif isinstance(m, SinrModel):
            parts.append(f"r={m.r!r}")
            parts.append(f"R={m.R!r}")
        else:
            parts.append(f"r_avg={m.r_avg!r}")
        parts.append(f"L={gp.L!r}")
        parts.append(f"n={gp.n}")
        parts.append(f"sigma_err={gp.sigma_err!r}")
        rng = gp.max_apparent_range
        parts.append(f"max_apparent_range={'none' if rng is None else repr(rng)}")
        parts.append(f"max_attempts={gp.max_attempts}")
    parts.append(f"seed={net.seed}")
    parts.append(f"discarded={net.discarded_attempts}")
    return "params " + " ".join(parts)


def save_network(net: LocalizedNetwork, path) -> None:
    lines = [_HEADER, _params_line(net)]
    for i in range(net.graph.n):
        tp = net.true_positions[i]
        ap = net.apparent_positions[i]
        lines.append(f"node {i} {tp.x!r} {tp.y!r} {ap.x!r} {ap.y!r}")
    for u, v in net.graph.edges():
        lines.append(f"edge {u} {v}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_kv(line_no: int, tokens: list[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(line_no, f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        if key in out:
            raise ParseError(line_no, f"duplicate key {key!r}")
        out[key] = val
    return out

def _take(kv: dict, key: str, line_no: int, conv):
    if key not in kv:
        raise ParseError(line_no, f"missing key {key!r}")
    raw = kv.pop(key)
    try:
        return conv(raw)
    except ValueError:
        raise ParseError(line_no, f"bad value for {key}: {raw!r}") from None


def _parse_params(line_no: int, kv: dict[str, str]):
    model_name = _take(kv, "model", line_no, str)
    seed = _take(kv, "seed", line_no, int)
    discarded = _take(kv, "discarded", line_no, int)
    if model_name == "none":
        n = _take(kv, "n", line_no, int)
        if kv:
            raise ParseError(line_no, f"unexpected keys {sorted(kv)}")
        return None, n, seed, discarded
    if model_name == "random":
        model = RandomModel(p=_take(kv, "p", line_no, float))
    elif model_name == "sinr":
        model = SinrModel(r=_take(kv, "r", line_no, float),
                          R=_take(kv, "R", line_no, float))
    elif model_name == "exponential":
        model = ExponentialModel(r_avg=_take(kv, "r_avg", line_no, float))
    else:
        raise ParseError(line_no, f"unknown model {model_name!r}")
    L = _take(kv, "L", line_no, float)
    n = _take(kv, "n", line_no, int)
    sigma_err = _take(kv, "sigma_err", line_no, float)
    raw_range = _take(kv, "max_apparent_range", line_no, str)
    try:
        max_range = None if raw_range == "none" else float(raw_range)
    except ValueError:
        raise ParseError(line_no, f"bad max_apparent_range {raw_range!r}") from None
    max_attempts = _take(kv, "max_attempts", line_no, int)
    if kv:
        raise ParseError(line_no, f"unexpected keys {sorted(kv)}")
    try:
        params = GenParams(L=L, model=model, n=n, sigma_err=sigma_err,
                           max_apparent_range=max_range,
                           max_attempts=max_attempts)
    except ValueError as exc:
        raise ParseError(line_no, str(exc)) from None
    return params, n, seed, discarded


def load_network(path) -> LocalizedNetwork:
    with open(path, encoding="ascii") as fh:
        raw_lines = fh.read().splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw_lines)
             if ln.strip()]
    if not lines or lines[0][1] != _HEADER:
        raise ParseError(lines[0][0] if lines else 1,
                         f"expected header {_HEADER!r}")
    if len(lines) < 2 or not lines[1][1].startswith("params "):
        raise ParseError(2, "expected a params line")
    pline_no, pline = lines[1]
    params, n, seed, discarded = _parse_params(
        pline_no, _parse_kv(pline_no, pline.split()[1:]))

    true_pos: dict[int, Point2] = {}
    app_pos: dict[int, Point2] = {}
    edges: list[tuple[int, int]] = []
    for line_no, line in lines[2:]:
        tokens = line.split()
        if tokens[0] == "node":
            if len(tokens) != 6:
                raise ParseError(line_no, "node lines take id and 4 coordinates")
            try:
                nid = int(tokens[1])
                vals = [float(t) for t in tokens[2:]]
            except ValueError:
                raise ParseError(line_no, f"malformed node line {line!r}") from None
            if not 0 <= nid < n:
                raise ParseError(line_no, f"node id {nid} out of range [0, {n})")
            if nid in true_pos:
                raise ParseError(line_no, f"duplicate node id {nid}")
            true_pos[nid] = Point2(vals[0], vals[1])
            app_pos[nid] = Point2(vals[2], vals[3])
        elif tokens[0] == "edge":
            if len(tokens) != 3:
                raise ParseError(line_no, "edge lines take two node ids")
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise ParseError(line_no, f"malformed edge line {line!r}") from None
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ParseError(line_no, f"bad edge ({u}, {v})")
            if u not in true_pos or v not in true_pos:
                raise ParseError(line_no, "edge before both node lines")
            edges.append((u, v))
        else:
            raise ParseError(line_no, f"unknown record {tokens[0]!r}")
    if len(true_pos) != n:
        raise ParseError(lines[-1][0] if lines else 1,
                         f"expected {n} node lines, found {len(true_pos)}")
    return LocalizedNetwork(
        true_positions=tuple(true_pos[i] for i in range(n)),
        apparent_positions=tuple(app_pos[i] for i in range(n)),
        graph=CommGraph.from_edges(n, edges),
        gen_params=params,
        seed=seed,
        discarded_attempts=discarded,
    )
