"""Command-line entry points.

Subcommands: generate, route, simulate, scan, scaling, fit, bounds.
Exit codes: 0 success, 1 validation error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .graph import (
    DegreeDistribution,
    GraphError,
    build_configuration_model,
    largest_component,
    load_edge_list,
    sample_degree_sequence,
    save_edge_list,
    structural_cutoff,
)
from .routing import (
    RoutingError,
    hub_avoidance_routes,
    predict_gamma_c,
    route_betweenness,
    shortest_path_routes,
    streaming_betweenness,
)
from .dynamics import SimulationError, run_simulation
from .bounds import BoundsError, edge_expansion, min_sparsity_separator
from .harness import (
    ConfigError,
    ExperimentConfig,
    fit_scaling_csv,
    read_csv,
    scaling_study,
    scan_gamma,
    write_csv,
)

VALIDATION_ERRORS = (ConfigError, ValueError, argparse.ArgumentTypeError)
RUNTIME_ERRORS = (GraphError, RoutingError, SimulationError, BoundsError, OSError)


def _cutoff_arg(text):
    if text == "sqrt":
        return "sqrt"
    if text in ("none", "null"):
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cutoff must be 'sqrt', 'none' or an integer, got {text!r}"
        ) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sfroute",
        description="Packet routing, congestion thresholds and topological "
        "bounds on scale-free networks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="configuration-model graph to edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--k-min", type=int, default=3)
    p.add_argument("--cutoff", type=_cutoff_arg, default="sqrt")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--collision-policy", choices=["rematch", "rewire"], default="rewire"
    )
    p.add_argument(
        "--keep-disconnected",
        action="store_true",
        help="skip largest-component extraction",
    )

    p = sub.add_parser("route", help="build a routing table, emit betweenness")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--protocol", choices=["SP", "HA"], default="SP")
    p.add_argument("--fraction", type=float, default=0.01, help="HA removal fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="betweenness report CSV")
    p.add_argument("--dump-table", help="debug-scale route table dump path")

    p = sub.add_parser("simulate", help="single-gamma dynamics run")
    p.add_argument("--graph", required=True)
    p.add_argument("--protocol", choices=["SP", "HA"], default="SP")
    p.add_argument("--fraction", type=float, default=0.01)
    p.add_argument("--route-seed", type=int, default=0)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--t-warm", type=int, default=1000)
    p.add_argument("--t-meas", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="theta CSV output")
    p.add_argument("--trace", help="per-step trace CSV")

    for name, help_text in (
        ("scan", "theta(gamma) sweep over a grid"),
        ("scaling", "maximal betweenness vs system size"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=True)
        p.add_argument("--seed", type=int, dest="master_seed")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--n", type=int, action="append", dest="n_list")
        p.add_argument("--exponent", type=float)
        p.add_argument("--k-min", type=int, dest="k_min")
        p.add_argument("--cutoff", type=_cutoff_arg)
        p.add_argument(
            "--protocol", action="append", dest="protocols", choices=["SP", "HA"]
        )
        p.add_argument("--ha-fraction", type=float, dest="ha_fraction")
        p.add_argument("--gamma", type=float, action="append", dest="gammas")
        p.add_argument("--t-warm", type=int, dest="t_warm")
        p.add_argument("--t-meas", type=int, dest="t_meas")
        p.add_argument("--replicas", type=int)
        p.add_argument("--graph-file", dest="graph_file")

    p = sub.add_parser("fit", help="power-law exponent from a scaling CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="fit results CSV")

    p = sub.add_parser("bounds", help="separator and expansion on a small graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--max-nodes", type=int, default=20)
    p.add_argument("--out", help="CSV output (text block goes to stdout)")

    return parser


def _load_config(args):
    keys = (
        "n_list", "exponent", "k_min", "cutoff", "protocols", "ha_fraction",
        "gammas", "t_warm", "t_meas", "replicas", "master_seed", "graph_file",
    )
    overrides = {k: getattr(args, k, None) for k in keys}
    if args.config:
        return ExperimentConfig.from_json(args.config, overrides)
    return ExperimentConfig.from_dict({}, overrides)


def cmd_generate(args):
    k_max = args.cutoff
    if k_max == "sqrt":
        k_max = structural_cutoff(args.n, args.exponent)
    elif k_max is None:
        k_max = args.n - 1
    dist = DegreeDistribution(exponent=args.exponent, k_min=args.k_min, k_max=k_max)
    seq = sample_degree_sequence(args.n, dist, args.seed)
    g = build_configuration_model(
        seq, (args.seed, 1), collision_policy=args.collision_policy
    )
    if not args.keep_disconnected:
        g, _ = largest_component(g)
    save_edge_list(g, args.out)
    print(f"wrote {args.out}: n={g.n} m={g.edge_count}")


def cmd_route(args):
    g = load_edge_list(args.graph)
    if args.dump_table or g.n <= 2000:
        if args.protocol == "SP":
            table = shortest_path_routes(g, args.seed)
        else:
            table = hub_avoidance_routes(g, args.fraction, args.seed)
        report = route_betweenness(table, g.n)
        if args.dump_table:
            table.dump(args.dump_table)
    else:
        report = streaming_betweenness(
            g, args.protocol, args.seed,
            args.fraction if args.protocol == "HA" else None,
        )
    report.to_csv(args.out)
    print(
        f"B={report.max_betweenness} argmax={report.argmax_node} "
        f"gamma_c_paper={predict_gamma_c(report, 'paper'):.6g} "
        f"gamma_c_exact={predict_gamma_c(report, 'exact'):.6g}"
    )


def cmd_simulate(args):
    g = load_edge_list(args.graph)
    if args.protocol == "SP":
        table = shortest_path_routes(g, args.route_seed)
    else:
        table = hub_avoidance_routes(g, args.fraction, args.route_seed)
    est = run_simulation(
        g, table, args.gamma, args.t_warm, args.t_meas,
        seed=args.seed, trace_path=args.trace,
    )
    print(f"gamma={est.gamma} theta={est.theta:.6g}")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("gamma,theta,t_warm,t_meas,seed\n")
            fh.write(
                f"{est.gamma!r},{est.theta!r},{est.t_warm},"
                f"{est.t_meas},{args.seed}\n"
            )


def cmd_scan(args):
    cfg = _load_config(args)
    rows = scan_gamma(cfg, out_path=args.out)
    print(f"wrote {args.out}: {len(rows)} rows")


def cmd_scaling(args):
    cfg = _load_config(args)
    rows = scaling_study(cfg, out_path=args.out, workers=args.workers)
    print(f"wrote {args.out}: {len(rows)} rows")


def cmd_fit(args):
    rows = read_csv(args.input)
    if not rows:
        raise ValueError(f"no data rows in {args.input}")
    fits = fit_scaling_csv(rows)
    out_rows = [
        {
            "protocol": protocol,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        }
        for protocol, fit in sorted(fits.items())
    ]
    for row in out_rows:
        print(
            f"{row['protocol']}: slope={row['slope']:.4f} "
            f"intercept={row['intercept']:.4f} r2={row['r_squared']:.4f}"
        )
    if args.out:
        write_csv(
            args.out, ["protocol", "slope", "intercept", "r_squared"], out_rows
        )


def cmd_bounds(args):
    g = load_edge_list(args.graph)
    sep = min_sparsity_separator(g, max_nodes=args.max_nodes)
    exp = edge_expansion(g, max_nodes=args.max_nodes)
    print(sep.text_block())
    print(exp.text_block())
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("# separator: X,A,B,Q,B_T\n")
            fh.write(f"separator,{sep.csv_row()}\n")
            fh.write("# expansion: A,chi_e\n")
            fh.write(f"expansion,{exp.csv_row()}\n")


COMMANDS = {
    "generate": cmd_generate,
    "route": cmd_route,
    "simulate": cmd_simulate,
    "scan": cmd_scan,
    "scaling": cmd_scaling,
    "fit": cmd_fit,
    "bounds": cmd_bounds,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RUNTIME_ERRORS as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
