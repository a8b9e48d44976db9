"""Command-line interface: ``netcournot {gen,stats,solve,zeta,allocate,sweep}``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from .equilibrium import WELFARE_VARIANTS, EquilibriumModel
from .exceptions import NetCournotError, ParameterError
from .network import GameParams, MarketNetwork, generate_synthetic, load_network, stats, write_network
from .policy import STRATEGIES, ZETA_MODES, Strategy, allocate, check_feasibility, rank_markets
from .sensitivity import sensitivity_report, zeta_gradient, zeta_paper
from .sweep import (
    DEFAULT_BUDGET_POINTS,
    DEFAULT_RANDOM_TRIALS,
    SweepConfig,
    default_budget_grid,
    dominance_rate,
    run_sweep,
)

DEFAULT_ALPHA = 10.0
DEFAULT_BETA = 1.0
DEFAULT_COST = 1.0
DEFAULT_QT_FRACTION = 0.05


def _parse_triple(text: str) -> tuple[int, int, int]:
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected FIRMS,MARKETS,EDGES")
    return tuple(parts)


def _add_shared(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("network source")
    src.add_argument("--edges", type=Path, help="edge table with header firm_id,market_id")
    src.add_argument("--synthetic", type=_parse_triple, metavar="F,M,E", help="generate a random network")
    src.add_argument("--expect-counts", type=_parse_triple, metavar="F,M,E", help="required network counts")
    p.add_argument("--alpha", default=str(DEFAULT_ALPHA), help="demand intercept, or a market_id,alpha CSV")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--cost", type=float, default=DEFAULT_COST, help="cost coefficient c")
    p.add_argument("--qt", type=float, default=None, help="per-market shock cap (default 5%% of min alpha/beta)")
    p.add_argument("--variant", choices=WELFARE_VARIANTS, default="with_government")
    p.add_argument("--zeta", choices=ZETA_MODES, default="gradient")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netcournot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic edge table")
    gen.add_argument("--firms", type=int, required=True)
    gen.add_argument("--markets", type=int, required=True)
    gen.add_argument("--n-edges", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, help="output directory (edges.csv); stdout if omitted")

    for name, help_text in [
        ("stats", "network counts and degree histograms"),
        ("solve", "equilibrium outcome for a shock vector"),
        ("zeta", "welfare sensitivity coefficients"),
        ("allocate", "allocate a budget with one strategy"),
        ("sweep", "budget sweep over all strategies"),
    ]:
        sp = sub.add_parser(name, help=help_text)
        _add_shared(sp)
        if name == "solve":
            sp.add_argument("--eps", help="one shock for every market, a comma list, or a JSON file (default: zero)")
        if name == "zeta":
            sp.add_argument("--jacobian", action="store_true", help="include the dense Jacobian")
        if name == "allocate":
            sp.add_argument("--budget", type=float, required=True)
            sp.add_argument("--strategy", choices=STRATEGIES, default="Linear")
            sp.add_argument("--only-positive", action="store_true", help="skip markets with score <= 0")
            sp.add_argument("--solve", action="store_true", help="also report the shocked equilibrium")
        if name == "sweep":
            sp.add_argument("--budgets", default=str(DEFAULT_BUDGET_POINTS), help="point count or comma list")
            sp.add_argument("--strategies", default=",".join(STRATEGIES))
            sp.add_argument("--random-trials", type=int, default=DEFAULT_RANDOM_TRIALS)
            sp.add_argument("--save-allocations", action="store_true")
            sp.add_argument("--no-plots", action="store_true")
    return parser


def _load_net(args) -> MarketNetwork:
    if (args.edges is None) == (args.synthetic is None):
        raise ParameterError("give exactly one of --edges or --synthetic")
    if args.edges is not None:
        return load_network(args.edges, expected_counts=args.expect_counts)
    net = generate_synthetic(*args.synthetic, seed=args.seed)
    if args.expect_counts is not None and tuple(args.expect_counts) != (net.n_firms, net.n_markets, net.n_edges):
        raise ParameterError("synthetic counts do not match --expect-counts")
    return net


def _read_alpha(spec: str, net: MarketNetwork) -> np.ndarray:
    try:
        return np.full(net.n_markets, float(spec))
    except ValueError:
        pass
    values = {}
    with open(spec, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            values[row["market_id"].strip()] = float(row["alpha"])
    missing = [m for m in net.market_ids if m not in values]
    if missing:
        raise ParameterError(f"alpha file lacks markets {missing[:5]}")
    return np.array([values[m] for m in net.market_ids])


def _params(args, net: MarketNetwork) -> GameParams:
    alpha = _read_alpha(args.alpha, net)
    q_t = args.qt if args.qt is not None else DEFAULT_QT_FRACTION * float(np.min(alpha / args.beta))
    return GameParams(alpha=alpha, beta=args.beta, c=args.cost, q_t=q_t)


def _parse_eps(text: str | None, n: int) -> np.ndarray:
    if text is None:
        return np.zeros(n)
    path = Path(text)
    if path.exists():
        values = json.loads(path.read_text())
        if isinstance(values, dict):
            values = values["epsilon"]
    else:
        values = [float(x) for x in text.split(",")]
    eps = np.asarray(values, dtype=float)
    if eps.shape == (1,):
        eps = np.full(n, eps[0])
    if eps.shape != (n,):
        raise ParameterError(f"expected {n} shocks, got {eps.size}")
    return eps


def _emit(payload: dict, args, filename: str, net: MarketNetwork | None = None) -> None:
    text = json.dumps(payload, indent=2)
    print(text)
    if getattr(args, "out", None) is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / filename).write_text(text + "\n", encoding="utf-8")
        if net is not None:
            (args.out / "index_map.json").write_text(json.dumps(net.index_map(), indent=2) + "\n")


def cmd_gen(args) -> int:
    net = generate_synthetic(args.firms, args.markets, args.n_edges, args.seed)
    if args.out is None:
        write_network(net, sys.stdout)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        write_network(net, args.out / "edges.csv")
        print(json.dumps({"edges_file": str(args.out / "edges.csv"), **stats(net).to_dict()}, indent=2))
    return 0


def cmd_stats(args) -> int:
    net = _load_net(args)
    _emit(stats(net).to_dict(), args, "stats.json", net)
    return 0


def cmd_solve(args) -> int:
    net = _load_net(args)
    params = _params(args, net)
    model = EquilibriumModel(net, params)
    out = model.outcome(_parse_eps(args.eps, net.n_markets))
    _emit(out.to_dict(), args, "solve.json", net)
    return 0


def cmd_zeta(args) -> int:
    net = _load_net(args)
    model = EquilibriumModel(net, _params(args, net))
    report = sensitivity_report(model, args.variant)
    _emit(report.to_dict(include_jacobian=args.jacobian), args, "zeta.json", net)
    return 0


def cmd_allocate(args) -> int:
    net = _load_net(args)
    params = _params(args, net)
    model = EquilibriumModel(net, params)
    strategy = Strategy(
        args.strategy,
        seed=args.seed if args.strategy == "Random" else None,
        zeta_mode=args.zeta,
        variant=args.variant,
    )
    scores = None
    if strategy.kind == "Linear":
        scores = zeta_paper(model) if args.zeta == "paper" else zeta_gradient(model, args.variant)
    order = rank_markets(strategy, net, params, scores=scores)
    alloc = allocate(
        net, params, order, budget=args.budget, strategy=strategy,
        only_positive=scores if args.only_positive and scores is not None else None,
    )
    payload = alloc.to_dict()
    payload["violations"] = check_feasibility(alloc.eps, params, args.budget)
    if args.solve:
        payload["outcome"] = model.outcome(alloc.eps).to_dict()
    _emit(payload, args, f"allocation_{strategy.kind}_{args.budget!r}.json", net)
    return 0


def cmd_sweep(args) -> int:
    start = time.perf_counter()
    net = _load_net(args)
    params = _params(args, net)
    model = EquilibriumModel(net, params)
    if "," in args.budgets:
        grid = [float(x) for x in args.budgets.split(",")]
    else:
        grid = default_budget_grid(params, int(args.budgets))
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    config = SweepConfig(
        budget_grid=grid,
        strategies=strategies,
        random_trials=args.random_trials,
        variant=args.variant,
        zeta_mode=args.zeta,
        seed=args.seed,
    )
    table = run_sweep(model, config, keep_allocations=args.save_allocations)

    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    table.write_csv(out / "trajectories.csv")
    (out / "index_map.json").write_text(json.dumps(net.index_map(), indent=2) + "\n")
    if args.save_allocations:
        for (name, budget), alloc in table.allocations.items():
            (out / f"allocation_{name}_{budget!r}.json").write_text(json.dumps(alloc.to_dict(), indent=2) + "\n")
    if not args.no_plots:
        from .plots import plot_differences

        plot_differences(table, out)
    summary = {
        "trajectories": str(out / "trajectories.csv"),
        "budgets": len(grid),
        "strategies": list(config.strategies),
        "dominance_rate": {s: dominance_rate(table, s) for s in config.strategies if s != "Linear"},
        "seconds": round(time.perf_counter() - start, 3),
    }
    print(json.dumps(summary, indent=2))
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "stats": cmd_stats,
    "solve": cmd_solve,
    "zeta": cmd_zeta,
    "allocate": cmd_allocate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (NetCournotError, OSError, KeyError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
