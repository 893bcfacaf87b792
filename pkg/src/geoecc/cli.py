"""Command-line interface: generate, measure, route, protocol, campaign.

Exit codes: 0 success, 2 parse or config error, 3 disconnected or
unreachable connectivity, 4 protocol global failure, 5 routing dead end.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import campaign as campaign_mod
from .canonical import build_canonical
from .distributed import Success, run_full_protocol
from .eccentricity import full_report
from .errors import (
    ConnectivityExhausted,
    Disconnected,
    ParseError,
    ProbeLost,
)
from .navigation import DEAD_END, DELIVERED, route
from .netgen import (
    ExponentialModel,
    GenParams,
    RandomModel,
    SinrModel,
    generate,
)
from .netio import load_network, save_network

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DISCONNECTED = 3
EXIT_GLOBAL_FAILURE = 4
EXIT_DEAD_END = 5

PAPER_L = 25.0
DESK_L = 10.0


def _model_from_args(args) -> SinrModel | RandomModel | ExponentialModel:
    if args.model == "sinr":
        if args.r is None or args.R is None:
            raise ParseError("sinr model needs --r and --R")
        return SinrModel(r=args.r, R=args.R)
    if args.model == "random":
        if args.p is None:
            raise ParseError("random model needs --p")
        return RandomModel(p=args.p)
    if args.r_avg is None:
        raise ParseError("exponential model needs --r-avg")
    return ExponentialModel(r_avg=args.r_avg)


def cmd_generate(args) -> int:
    try:
        model = _model_from_args(args)
        L = args.L if args.L is not None else (
            PAPER_L if args.paper_scale else DESK_L)
        params = GenParams(L=L, model=model, n=args.n,
                           sigma_err=args.sigma_err,
                           max_apparent_range=args.max_apparent_range,
                           max_attempts=args.max_attempts)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        net = generate(params, args.seed)
    except ConnectivityExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    if args.out:
        save_network(net, args.out)
    print(f"n = {net.n}")
    print(f"edges = {len(net.graph.edges())}")
    print(f"connected = {net.graph.is_connected()}")
    print(f"discarded = {net.discarded_attempts}")
    if args.out:
        print(f"saved {args.out}")
    return EXIT_OK


def _box_json(box):
    (xmin, ymin), (xmax, ymax) = box
    return [[xmin, ymin], [xmax, ymax]]


def _report_dict(rep) -> dict:
    return {
        "D": rep.D,
        "N": {str(i): v for i, v in sorted(rep.N.items())},
        "k_T": rep.k_T,
        "k_e": rep.k_e,
        "k_g": rep.k_g,
        "dk": rep.dk,
        "dN": rep.dN,
        "metadata": {
            "box": _box_json(rep.metadata["box"]),
            "tie_policy": rep.metadata["tie_policy"],
        },
    }


def cmd_measure(args) -> int:
    try:
        net = load_network(args.net_file)
        rep = full_report(net)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Disconnected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    if args.format == "json":
        text = json.dumps(_report_dict(rep), indent=2)
    else:
        lines = [
            f"D = {rep.D}",
            f"N1 = {rep.N[1]}",
            f"Nke = {rep.N[rep.k_e]}",
            f"Nkg = {rep.N[rep.k_g]}",
            f"kT = {rep.k_T}",
            f"ke = {rep.k_e}",
            f"kg = {rep.k_g}",
            f"dk = {rep.dk}",
            f"dN = {rep.dN}",
        ]
        text = "\n".join(lines)
    _emit(text, args.out)
    return EXIT_OK


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _trace_lines(trace) -> list[str]:
    lines = [f"outcome = {trace.outcome}"]
    lines.append("hops = " + " ".join(str(h) for h in trace.hops))
    lines.append(f"hop_count = {trace.hop_count}")
    lines.append(f"handovers = {trace.handovers}")
    stretch = trace.stretch
    lines.append(f"stretch = {stretch if math.isfinite(stretch) else 'inf'}")
    if trace.dead_point is not None:
        x, y = trace.dead_point
        lines.append(f"dead_point = {x!r} {y!r}")
    lines.append("trajectory = " + " ".join(
        f"{x!r},{y!r}" for x, y in trace.trajectory))
    return lines


def cmd_route(args) -> int:
    try:
        net = load_network(args.net_file)
        rep = full_report(net)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Disconnected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    k = args.k if args.k is not None else rep.k_g
    if k < rep.k_g and not args.force:
        print(f"error: k = {k} is below the measured horizon "
              f"kg = {rep.k_g}; pass --force to route anyway",
              file=sys.stderr)
        return EXIT_CONFIG
    sim = build_canonical(net, k)

    if args.all_pairs:
        n = net.n
        delivered = 0
        dead_ends = 0
        stretches = []
        for s in range(n):
            for t in range(n):
                if s == t:
                    continue
                trace = route(sim, args.engine, s, t)
                if trace.outcome == DELIVERED:
                    delivered += 1
                    if math.isfinite(trace.stretch):
                        stretches.append(trace.stretch)
                else:
                    dead_ends += 1
        pairs = n * (n - 1)
        rate = delivered / pairs
        lines = [
            f"pairs = {pairs}",
            f"delivered = {delivered}",
            f"delivery_rate = {rate!r}",
            f"dead_ends = {dead_ends}",
        ]
        if stretches:
            lines.append(f"mean_stretch = {sum(stretches) / len(stretches)!r}")
            lines.append(f"max_stretch = {max(stretches)!r}")
        _emit("\n".join(lines), args.out)
        return EXIT_OK if dead_ends == 0 else EXIT_DEAD_END

    if args.source is None or args.dest is None:
        print("error: need --source and --dest (or --all-pairs)",
              file=sys.stderr)
        return EXIT_CONFIG
    trace = route(sim, args.engine, args.source, args.dest)
    _emit("\n".join(_trace_lines(trace)), args.out)
    return EXIT_OK if trace.outcome != DEAD_END else EXIT_DEAD_END


def cmd_protocol(args) -> int:
    try:
        net = load_network(args.net_file)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Disconnected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    rounds: list[str] = []
    trace = rounds.append if args.trace else None
    try:
        run = run_full_protocol(net, args.k, trace=trace)
    except Disconnected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except ProbeLost as exc:
        lines = [*rounds, "verdict = failure", "cause = probe lost",
                 f"detail = {exc}"]
        _emit("\n".join(lines), args.out)
        return EXIT_GLOBAL_FAILURE
    m = run.messages_sent
    if args.format == "json":
        doc = {
            "k": run.k,
            "rounds": run.rounds,
            "messages": {
                "delaunay": m.delaunay,
                "probe": m.probe,
                "probe_dedup": m.probe_dedup,
                "zone": m.zone,
                "total": m.total,
            },
        }
        if isinstance(run.verdict, Success):
            doc["verdict"] = "success"
            doc["holes"] = [list(p) for p in sorted(run.verdict.holes)]
        else:
            doc["verdict"] = "failure"
            doc["cause"] = run.verdict.cause.value
            doc["witness"] = repr(run.verdict.witness)
        if args.trace:
            doc["trace"] = rounds
        _emit(json.dumps(doc, indent=2), args.out)
    else:
        lines = list(rounds)
        if isinstance(run.verdict, Success):
            lines.append("verdict = success")
            lines.append("holes = " + " ".join(
                f"{a}-{b}" for a, b in sorted(run.verdict.holes)))
        else:
            lines.append("verdict = failure")
            lines.append(f"cause = {run.verdict.cause.value}")
            lines.append(f"witness = {run.verdict.witness!r}")
        lines.append(f"rounds = {run.rounds}")
        lines.append(f"messages_delaunay = {m.delaunay}")
        lines.append(f"messages_probe = {m.probe}")
        lines.append(f"messages_probe_dedup = {m.probe_dedup}")
        lines.append(f"messages_zone = {m.zone}")
        lines.append(f"messages_total = {m.total}")
        _emit("\n".join(lines), args.out)
    if isinstance(run.verdict, Success):
        return EXIT_OK
    return EXIT_GLOBAL_FAILURE


def cmd_campaign(args) -> int:
    try:
        config = campaign_mod.parse_config(args.config,
                                           paper_scale=args.paper_scale)
        overrides = {}
        if args.out:
            overrides["out_dir"] = Path(args.out)
        if args.seed is not None:
            overrides["seed_base"] = args.seed
        if overrides:
            config = dataclasses.replace(config, **overrides)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = campaign_mod.CampaignResult()
    try:
        campaign_mod.run_campaign(config, result)
    except KeyboardInterrupt:
        written = campaign_mod.write_outputs(result, config)
        for path in written:
            print(f"wrote {path} (partial)", file=sys.stderr)
        return 130
    written = campaign_mod.write_outputs(result, config)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoecc",
        description="Geographic eccentricity measurement and routing "
                    "experiments on localized networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a localized network")
    gen.add_argument("--model", choices=["sinr", "random", "exponential"],
                     required=True)
    gen.add_argument("--r", type=float, help="sinr certain-link radius")
    gen.add_argument("--R", type=float, help="sinr maximum link radius")
    gen.add_argument("--p", type=float, help="random-model link probability")
    gen.add_argument("--r-avg", type=float,
                     help="exponential-model average radius")
    gen.add_argument("--L", type=float,
                     help="deployment height; rectangle is 4L x L")
    gen.add_argument("--n", type=int, help="node count (default 4L^2)")
    gen.add_argument("--sigma-err", type=float, default=0.0,
                     help="localization error scale")
    gen.add_argument("--max-apparent-range", type=float, default=None)
    gen.add_argument("--max-attempts", type=int, default=1000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--paper-scale", action="store_true",
                     help="default L to 25 instead of 10")
    gen.add_argument("-o", "--out", help="write the network file here")
    gen.set_defaults(func=cmd_generate)

    mea = sub.add_parser("measure", help="eccentricity report for a network")
    mea.add_argument("net_file")
    mea.add_argument("--format", choices=["text", "json"], default="text")
    mea.add_argument("--out", help="write the report here instead of stdout")
    mea.set_defaults(func=cmd_measure)

    rou = sub.add_parser("route", help="route messages on a network")
    rou.add_argument("net_file")
    rou.add_argument("--k", type=int, default=None,
                     help="zone horizon (default: measured kg)")
    rou.add_argument("--engine",
                     choices=["gradient", "gradient_perimeter"],
                     default="gradient_perimeter")
    rou.add_argument("--source", type=int)
    rou.add_argument("--dest", type=int)
    rou.add_argument("--all-pairs", action="store_true",
                     help="route every ordered pair and print a summary")
    rou.add_argument("--force", action="store_true",
                     help="allow k below the measured horizon")
    rou.add_argument("--out", help="write the trace here instead of stdout")
    rou.set_defaults(func=cmd_route)

    pro = sub.add_parser("protocol", help="run the distributed verdict")
    pro.add_argument("net_file")
    pro.add_argument("--k", type=int, required=True)
    pro.add_argument("--format", choices=["text", "json"], default="text")
    pro.add_argument("--trace", action="store_true",
                     help="include one line per protocol round")
    pro.add_argument("--out", help="write the report here instead of stdout")
    pro.set_defaults(func=cmd_protocol)

    cam = sub.add_parser("campaign", help="run a measurement campaign")
    cam.add_argument("config", help="campaign config file")
    cam.add_argument("--out", help="override the output directory")
    cam.add_argument("--seed", type=int, default=None,
                     help="override the config seed_base")
    cam.add_argument("--paper-scale", action="store_true",
                     help="default to 100 instances per cell")
    cam.set_defaults(func=cmd_campaign)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
