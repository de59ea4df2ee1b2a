"""Command-line entry point: ``qnrobust <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import analytics, capacity, netgen, perturb
from ..errors import DataError, NumericalError
from ..geo_channel import ChannelParams
from .config import load_config
from .io import load_graph, save_graph, write_records
from .sweep import run_sweep

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _channel(args) -> ChannelParams:
    return ChannelParams(args.gamma, args.min_distance)


def _model_params(args):
    if args.model == "waxman":
        if args.rho is not None:
            return netgen.WaxmanParams.at_density(args.rho, args.alpha, args.beta)
        if args.n_nodes is None or args.R is None:
            raise DataError("waxman needs --rho or both --n-nodes and --R")
        return netgen.WaxmanParams(args.n_nodes, args.R, args.alpha, args.beta)
    if args.n_nodes is None or args.R is None:
        raise DataError("scale_free needs --n-nodes and --R")
    return netgen.ScaleFreeParams(args.n_nodes, args.R, args.m0, args.attachment)


def cmd_generate(args) -> int:
    params = _model_params(args)
    gen = netgen.generate_waxman if args.model == "waxman" else netgen.generate_scale_free
    g = gen(params, args.seed, _channel(args))
    save_graph(g, args.output)
    _emit({"output": str(args.output), "n_nodes": g.n_nodes, "n_edges": g.n_edges})
    return EXIT_OK


def cmd_perturb(args) -> int:
    g0 = load_graph(args.graph)
    g = perturb.Perturbation(args.kind, args.p, args.mode, args.adaptive).apply(g0, args.seed)
    save_graph(g, args.output)
    out = {"output": str(args.output), "n_nodes": g.n_nodes, "n_edges": g.n_edges}
    if g0.n_edges:
        out["p_eff"] = perturb.effective_edge_fraction(g0, g)
    _emit(out)
    return EXIT_OK


def cmd_capacity(args) -> int:
    g = load_graph(args.graph)
    if args.source is not None or args.target is not None:
        if args.source is None or args.target is None:
            raise DataError("--source and --target go together")
        _emit({"source": args.source, "target": args.target, "capacity": capacity.min_cut(g, args.source, args.target)})
        return EXIT_OK
    est = capacity.ensemble_capacity([g], args.pairs, args.seed)
    _emit({"mean": est.mean, "stderr": est.stderr, "n_pairs": est.n_pairs})
    return EXIT_OK


def cmd_analyze(args) -> int:
    g = load_graph(args.graph)
    hist = analytics.degree_histogram(g)
    comp = analytics.components(g)
    out = {
        "n_nodes": g.n_nodes,
        "n_edges": g.n_edges,
        "degree_histogram": {str(k): c for k, c in hist.counts.items()},
        "giant_fraction": comp.giant_fraction,
        "n_components": len(comp.component_sizes),
        "component_sizes_top": list(comp.component_sizes[:10]),
        "mean_small_size": comp.mean_small_size,
    }
    if g.n_nodes:
        out["mean_degree"], out["second_moment"] = analytics.degree_moments(hist)
        out["critical_probability"] = analytics.critical_probability(hist)
    if args.k_min is not None:
        out["power_law_exponent"] = analytics.power_law_fit(hist, args.k_min)
    _emit(out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    params = _model_params(args)
    ch = _channel(args)
    if args.model == "waxman":
        z = capacity.zeta_waxman(params, ch, args.samples, args.seed)
        bound = capacity.bound_waxman(capacity.BoundInputs(zeta=z.value, p=args.p, rho0=params.density))
    else:
        z = capacity.zeta_scale_free(params, ch, args.samples, args.seed)
        n = args.n_nodes
        giant = args.giant_size if args.giant_size is not None else n
        bound = capacity.bound_scale_free(capacity.BoundInputs(zeta=z.value, p=args.p, m0=params.m0), n, giant)
    _emit({"zeta": z.value, "zeta_stderr": z.stderr, "p": args.p, "bound": bound})
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    records = run_sweep(cfg, workers=args.workers)
    write_records(records, args.output, args.format)
    failed = sum(1 for r in records if r.error)
    _emit({"output": str(args.output), "records": len(records), "failed": failed})
    return EXIT_OK


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["waxman", "scale_free"], required=True)
    p.add_argument("--n-nodes", type=int)
    p.add_argument("--R", type=float, help="region half-width in km")
    p.add_argument("--rho", type=float, help="waxman: node density in km^-2 (sets R from alpha*L = 226 km)")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--m0", type=int, default=3)
    p.add_argument("--attachment", choices=["sequential", "systematic"], default="sequential")
    p.add_argument("--gamma", type=float, default=ChannelParams.gamma)
    p.add_argument("--min-distance", type=float, default=ChannelParams.min_distance)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qnrobust", description="Robustness of fiber quantum networks.")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a Waxman or scale-free network")
    _add_model_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("perturb", help="apply a breakdown or attack to a graph file")
    p.add_argument("graph", type=Path)
    p.add_argument("--kind", choices=[k.value for k in perturb.ErrorKind], required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mode", choices=[m.value for m in perturb.Mode], default="bernoulli")
    p.add_argument("--adaptive", action="store_true", help="attacks: re-rank after each removal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("capacity", help="mean end-to-end capacity over sampled pairs")
    p.add_argument("graph", type=Path)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", type=int)
    p.add_argument("--target", type=int)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("analyze", help="degree histogram, components, critical probability")
    p.add_argument("graph", type=Path)
    p.add_argument("--k-min", type=int, help="also fit a power-law tail from this degree")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bounds", help="zeta constants and capacity upper bounds")
    _add_model_args(p)
    p.add_argument("--p", type=float, default=0.0)
    p.add_argument("--giant-size", type=int, help="scale_free: giant component size (defaults to N)")
    p.add_argument("--samples", type=int, default=2_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="run a sweep config and write records")
    p.add_argument("config", type=Path)
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int, help="defaults to $QNROBUST_WORKERS or all CPUs")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"qnrobust: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, ValueError, OSError) as exc:
        print(f"qnrobust: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
