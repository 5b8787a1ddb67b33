"""Command-line front door for the navigation-gas pipeline.

Subcommands:
    simulate   synthesize a demonstrator trace on a map
    train      learn a gas from a trace file or a simulated run
    eval       report metrics for a stored gas document
    compare    chamfer-compare two stored gas documents
    export     convert a gas document to dot or csv
    report     train, then write the metrics table plus rendered figures
    serve      run the live websocket session server

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
malformed inputs). All outputs are deterministic for fixed flags, so
rerunning a command reproduces its files byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import gasdoc, traces
from .gng import EDGE_MODES, ConfigurationError, Gas, Params, new_gas
from .metrics import (
    MetricsRecorder,
    compare_graphs,
    cumulated_distance,
    detect_stable,
    obstacle_crossing_edges,
)
from .worlds import (
    BUILTIN_MAP_NAMES,
    WorldMap,
    builtin_map,
    read_waypoints,
    read_worldmap,
    simulate,
)

SIM_DEFAULTS = {"demonstrators": 1, "seed": 0, "duration": 60.0, "speed": 440.0, "rate": 10.0}


class UsageError(Exception):
    """Flag combination or value the parser alone cannot reject."""


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the documented usage exit code is 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("gas parameters")
    group.add_argument("--winner-attraction", type=float, default=0.03, metavar="F")
    group.add_argument("--neighbor-attraction", type=float, default=0.0006, metavar="F")
    group.add_argument("--error-decay", type=float, default=10.0, metavar="WU")
    group.add_argument("--max-error", type=float, default=20000.0, metavar="WU")
    group.add_argument("--max-age", type=int, default=75, metavar="N")
    group.add_argument("--edge-mode", choices=EDGE_MODES, default="proximity")


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--trace", metavar="FILE", help="trace file to replay")
    source.add_argument("--map", metavar="MAP", help="builtin map name or map file; simulate on it")
    parser.add_argument("--demonstrators", type=int, default=None, metavar="N")
    parser.add_argument("--seed", type=int, default=None, metavar="N")
    parser.add_argument("--duration", type=float, default=None, metavar="SECONDS")
    parser.add_argument("--speed", type=float, default=None, metavar="WU_PER_S")
    parser.add_argument(
        "--rate",
        type=float,
        default=None,
        metavar="HZ",
        help="simulation rate with --map, resampling rate with --trace",
    )
    _add_param_flags(parser)
    parser.add_argument("--waypoints", metavar="FILE", help="waypoint file for the metrics table")
    parser.add_argument("--stride", type=int, default=1, metavar="N", help="record metrics every N ticks")


def build_parser() -> _Parser:
    parser = _Parser(prog="navgas", description="Learn navigation graphs from demonstrator traces.")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True, parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="synthesize a demonstrator trace on a map")
    p_sim.add_argument("--map", required=True, metavar="MAP", help="builtin map name or map file")
    p_sim.add_argument("--demonstrators", type=int, default=1, metavar="N")
    p_sim.add_argument("--seed", type=int, default=0, metavar="N")
    p_sim.add_argument("--duration", type=float, default=60.0, metavar="SECONDS")
    p_sim.add_argument("--rate", type=float, default=10.0, metavar="HZ")
    p_sim.add_argument("--speed", type=float, default=440.0, metavar="WU_PER_S")
    p_sim.add_argument("--out", required=True, metavar="FILE", help="trace file to write")
    p_sim.set_defaults(func=cmd_simulate)

    p_train = sub.add_parser("train", help="learn a gas from a trace or a simulated run")
    _add_source_flags(p_train)
    p_train.add_argument("--out", metavar="FILE", help="gas document to write")
    p_train.add_argument("--metrics-out", metavar="FILE", help="metrics csv to write")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="report metrics for a stored gas")
    p_eval.add_argument("gas", metavar="GAS", help="gas document to read")
    p_eval.add_argument("--waypoints", metavar="FILE")
    p_eval.add_argument("--map", metavar="MAP", help="map for waypoint fallback and crossing count")
    p_eval.set_defaults(func=cmd_eval)

    p_cmp = sub.add_parser("compare", help="chamfer-compare two stored gases")
    p_cmp.add_argument("gas_a", metavar="GAS_A")
    p_cmp.add_argument("gas_b", metavar="GAS_B")
    p_cmp.set_defaults(func=cmd_compare)

    p_exp = sub.add_parser("export", help="convert a gas document to dot or csv")
    p_exp.add_argument("gas", metavar="GAS")
    p_exp.add_argument("--format", required=True, choices=("dot", "csv"))
    p_exp.add_argument("--out", metavar="FILE", help="write here instead of stdout")
    p_exp.set_defaults(func=cmd_export)

    p_rep = sub.add_parser("report", help="train, then write tables and figures to a directory")
    _add_source_flags(p_rep)
    p_rep.add_argument("--out", required=True, metavar="DIR", help="directory for all outputs")
    p_rep.set_defaults(func=cmd_report)

    p_srv = sub.add_parser("serve", help="run the live websocket session server")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8765)
    p_srv.set_defaults(func=cmd_serve)

    return parser


def _load_map(value: str) -> WorldMap:
    if value in BUILTIN_MAP_NAMES:
        return builtin_map(value)
    path = Path(value)
    if path.exists():
        return read_worldmap(path)
    known = ", ".join(BUILTIN_MAP_NAMES)
    raise ValueError(f"unknown map {value!r}: not a builtin ({known}) and no such file")


def _check_sim_flags(args: argparse.Namespace) -> None:
    if args.demonstrators is not None and args.demonstrators < 1:
        raise UsageError("--demonstrators must be >= 1")
    if args.duration is not None and not args.duration > 0:
        raise UsageError("--duration must be > 0")
    if args.rate is not None and not args.rate > 0:
        raise UsageError("--rate must be > 0")
    if args.speed is not None and not args.speed > 0:
        raise UsageError("--speed must be > 0")


def _params(args: argparse.Namespace) -> Params:
    params = Params(
        winner_attraction=args.winner_attraction,
        neighbor_attraction=args.neighbor_attraction,
        error_decay=args.error_decay,
        max_error=args.max_error,
        max_age=args.max_age,
        edge_mode=args.edge_mode,
    )
    try:
        params.validate()
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from exc
    return params


def _train(args: argparse.Namespace) -> tuple[Gas, MetricsRecorder, WorldMap | None]:
    """Shared train/report pipeline: resolve inputs, run feed, return state."""
    params = _params(args)
    if args.stride < 1:
        raise UsageError("--stride must be >= 1")
    _check_sim_flags(args)
    if args.trace is not None:
        for flag in ("demonstrators", "seed", "duration", "speed"):
            if getattr(args, flag) is not None:
                raise UsageError(f"--{flag} only applies to simulation input (--map)")
        trace = traces.read_trace(args.trace)
        if args.rate is not None:
            trace = traces.resample(trace, args.rate)
        world = None
    else:
        world = _load_map(args.map)
        sim_args = {
            key: default if getattr(args, key) is None else getattr(args, key)
            for key, default in SIM_DEFAULTS.items()
        }
        trace = simulate(world, **sim_args)
    if len(trace) == 0:
        raise ValueError("trace is empty")

    if args.waypoints is not None:
        waypoints = read_waypoints(args.waypoints)
    elif world is not None:
        waypoints = list(world.waypoints)
    else:
        waypoints = []
    if not waypoints:
        raise UsageError("metrics need waypoints: pass --waypoints or a map that has markers")

    gas = new_gas(params)
    recorder = MetricsRecorder(waypoints)
    traces.feed(gas, trace, observer=recorder, stride=args.stride)
    return gas, recorder, world


def _print_summary(gas: Gas, recorder: MetricsRecorder) -> None:
    final = cumulated_distance(recorder.waypoints, gas)
    window = max(1, len(recorder.series.records) // 5)
    stable = detect_stable(recorder.series, window=window, eps_rel=0.05)
    print(f"nodes {len(gas.nodes)}")
    print(f"cum_distance {final!r}")
    print(f"stable_tick {'none' if stable is None else stable}")


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.demonstrators < 1:
        raise UsageError("--demonstrators must be >= 1")
    if not args.duration > 0:
        raise UsageError("--duration must be > 0")
    if not args.rate > 0:
        raise UsageError("--rate must be > 0")
    if not args.speed > 0:
        raise UsageError("--speed must be > 0")
    world = _load_map(args.map)
    trace = simulate(
        world,
        demonstrators=args.demonstrators,
        seed=args.seed,
        duration=args.duration,
        speed=args.speed,
        rate=args.rate,
    )
    traces.write_trace(trace, args.out)
    print(f"wrote {args.out} ({len(trace)} samples)")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    gas, recorder, _ = _train(args)
    if args.out is not None:
        gasdoc.write_gas(gas, args.out)
    if args.metrics_out is not None:
        Path(args.metrics_out).write_text(recorder.series.to_csv(), encoding="utf-8")
    _print_summary(gas, recorder)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    gas = gasdoc.read_gas(args.gas)
    if not gas.nodes:
        raise ValueError(f"gas document {args.gas!r} has no nodes")
    world = _load_map(args.map) if args.map is not None else None
    if args.waypoints is not None:
        waypoints = read_waypoints(args.waypoints)
    elif world is not None:
        waypoints = list(world.waypoints)
    else:
        waypoints = []
    print(f"nodes {len(gas.nodes)}")
    if waypoints:
        print(f"cum_distance {cumulated_distance(waypoints, gas)!r}")
    if world is not None:
        print(f"crossings {len(obstacle_crossing_edges(gas, world))}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    gas_a = gasdoc.read_gas(args.gas_a)
    gas_b = gasdoc.read_gas(args.gas_b)
    report = compare_graphs(gas_a, gas_b)
    print(f"nodes_a {report['nodes_a']}")
    print(f"nodes_b {report['nodes_b']}")
    print(f"chamfer {report['chamfer']!r}")
    return 0


def format_dot(gas: Gas) -> str:
    """Graphviz document: one vertex per node, one undirected edge per edge."""
    lines = ["graph navgas {"]
    for node in sorted(gas.nodes.values(), key=lambda n: n.id):
        lines.append(
            f'  n{node.id} [pos="{node.x!r},{node.y!r},{node.z!r}", error="{node.error!r}"];'
        )
    for (a, b, kind), age in sorted(gas.edges.items()):
        lines.append(f'  n{a} -- n{b} [kind="{kind}", age={age}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_csv(gas: Gas) -> str:
    """Node table, one row per node, ids ascending."""
    lines = ["id,x,y,z,error"]
    for node in sorted(gas.nodes.values(), key=lambda n: n.id):
        lines.append(f"{node.id},{node.x!r},{node.y!r},{node.z!r},{node.error!r}")
    return "\n".join(lines) + "\n"


def cmd_export(args: argparse.Namespace) -> int:
    gas = gasdoc.read_gas(args.gas)
    document = format_dot(gas) if args.format == "dot" else format_csv(gas)
    if args.out is not None:
        Path(args.out).write_text(document, encoding="utf-8")
    else:
        sys.stdout.write(document)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    # matplotlib import is slow, keep it off every other command's path
    from . import plots

    gas, recorder, world = _train(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    gas_path = out / "gas.txt"
    gasdoc.write_gas(gas, gas_path)
    metrics_path = out / "metrics.csv"
    metrics_path.write_text(recorder.series.to_csv(), encoding="utf-8")
    graph_png = plots.plot_graph(gas, out / "graph.png", world=world)
    metrics_png = plots.plot_metrics(recorder.series, out / "metrics.png")
    _print_summary(gas, recorder)
    for path in (gas_path, metrics_path, graph_png, metrics_png):
        print(f"wrote {path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import build_app

    uvicorn.run(build_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"navgas: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"navgas: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
