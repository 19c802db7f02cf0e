"""Command-line interface.

Subcommands: build-graph, solve, estimate-gamma, cheeger-curve, synth,
experiment. Exit codes: 0 success, 2 usage/validation, 3
data/connectivity, 4 numerical failure. Set LG_PR_LOG=DEBUG|INFO|... to
control verbosity. Randomized subcommands take --seed; when omitted a
fresh seed is drawn, logged and printed so the run stays replayable.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import io
from .errors import DataError, NumericalError, ParameterError
from .gamma_select import GammaGrid, estimate_gamma
from .graph import NodeSet, build_knn_graph
from .harness import (
    ExperimentPlan,
    cheeger_curve_experiment,
    ratio_sweep_experiment,
    run_experiment,
)
from .pagerank import LabelAssignment, SeedVector, solve, solve_multiclass, sweep_cut
from .spectral import decompose, lgamma_graph
from .synth import PlantedPartitionConfig, generate_planted_partition

log = logging.getLogger("lgpr")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _setup_logging() -> None:
    level = os.environ.get("LG_PR_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _require_inputs(*paths) -> None:
    for p in paths:
        if p is not None and not os.path.exists(p):
            raise ParameterError(f"input file not found: {p}")


def _resolve_seed(seed) -> int:
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1)[0])
        log.info("no --seed given; drew %d", seed)
        print(f"seed: {seed}")
    return int(seed)


def _parse_float_list(text: str) -> list:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad numeric list {text!r}") from exc


def _parse_range(text: str) -> np.ndarray:
    return GammaGrid.parse(text).values


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_build_graph(args) -> int:
    _require_inputs(args.points)
    if args.k < 1:
        raise ParameterError(f"--k must be >= 1, got {args.k}")
    if args.sigma <= 0:
        raise ParameterError(f"--sigma must be positive, got {args.sigma}")
    points = io.load_features_csv(args.points)
    graph = build_knn_graph(points, k=args.k, sigma=args.sigma)
    io.save_edge_csv(graph, args.out)
    log.info("wrote %s (%d nodes)", args.out, graph.n)
    return EXIT_OK


def _load_graph_and_labels(args):
    _require_inputs(args.graph, args.labels)
    graph = io.load_edge_csv(args.graph)
    classes = io.load_labels_csv(args.labels)
    for s in classes:
        s.validate_within(graph.n)
    return graph, classes


def cmd_solve(args) -> int:
    graph, classes = _load_graph_and_labels(args)
    if args.mu <= 0:
        raise ParameterError(f"--mu must be positive, got {args.mu}")
    if args.gamma <= 0:
        raise ParameterError(f"--gamma must be positive, got {args.gamma}")
    sg = lgamma_graph(decompose(graph), args.gamma)
    if args.dump_lgamma:
        io.save_matrix_csv(sg.lgamma_matrix, args.dump_lgamma)
    if args.multiclass:
        result = solve_multiclass(sg, LabelAssignment.of(classes), args.mu)
        io.save_multiclass_csv(result.scores, result.assignments, args.out)
    else:
        if args.target_class >= len(classes):
            raise ParameterError(f"--target-class {args.target_class} not in labels")
        seed = SeedVector.from_node_set(classes[args.target_class], graph.n)
        score = solve(sg, seed, args.mu)
        io.save_scores_csv(score.values, args.out)
        if args.sweep:
            io.save_sweep_csv(sweep_cut(sg, score), args.sweep)
    return EXIT_OK


def cmd_estimate_gamma(args) -> int:
    graph, classes = _load_graph_and_labels(args)
    if args.target_class >= len(classes):
        raise ParameterError(f"--target-class {args.target_class} not in labels")
    grid = GammaGrid.parse(args.grid) if args.grid else GammaGrid.default()
    estimate = estimate_gamma(graph, classes[args.target_class], grid)
    if args.out_curve:
        io.save_curve_csv(estimate.cheeger_curve[:, 0], estimate.cheeger_curve[:, 1],
                          args.out_curve)
    summary = {
        "gamma_hat": estimate.gamma_hat,
        "walk_steps": estimate.walk_steps,
        "proxy_size": len(estimate.proxy_set),
        "mass_captured": estimate.mass_captured,
    }
    if args.out_summary:
        io.save_json(summary, args.out_summary)
    print(f"gamma_hat: {estimate.gamma_hat}")
    return EXIT_OK


def cmd_cheeger_curve(args) -> int:
    _require_inputs(args.graph, args.truth)
    graph = io.load_edge_csv(args.graph)
    classes = io.load_labels_csv(args.truth)
    if args.target_class >= len(classes):
        raise ParameterError(f"--target-class {args.target_class} not in labels")
    truth = classes[args.target_class]
    truth.validate_within(graph.n)
    grid = GammaGrid.parse(args.grid) if args.grid else GammaGrid.default()
    seed = _resolve_seed(args.seed)
    removals = _parse_float_list(args.removals) if args.removals else [0.1, 0.2, 0.3]
    cheeger_curve_experiment(
        graph, truth, grid.values, removal_fractions=tuple(removals),
        draws=args.subset_draws, seed=seed, out_path=args.out,
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.generator != "planted-partition":
        raise ParameterError(f"unknown generator {args.generator!r}")
    seed = _resolve_seed(args.seed)
    cfg = PlantedPartitionConfig(n=args.n, p_in=args.p_in, p_out=args.p_out, seed=seed)
    graph, truth = generate_planted_partition(cfg)
    io.save_edge_csv(graph, args.out)
    io.save_labels_csv([truth, truth.complement(graph)], args.truth)
    log.info("wrote %s and %s", args.out, args.truth)
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.plan is not None:
        _require_inputs(args.plan)
        with open(args.plan) as fh:
            plan = ExperimentPlan.from_json(fh.read())
        run_experiment(plan, out_dir=args.out, jobs=args.jobs)
        return EXIT_OK
    if args.generator == "planted-partition":
        if not args.ratio_sweep:
            raise ParameterError("planted-partition experiments need --ratio-sweep")
        ratios = _parse_range(args.ratio_sweep)
        gammas = _parse_float_list(args.gammas)
        seed = _resolve_seed(args.seed)
        mu_grid = None
        if args.mu_grid:
            start, stop, count = args.mu_grid.split(":")
            mu_grid = tuple(
                float(m) for m in np.logspace(np.log10(float(start)),
                                              np.log10(float(stop)), int(count))
            )
        ratio_sweep_experiment(
            n=args.n, c_avg=args.c_avg, ratios=ratios, gammas=gammas,
            graph_draws=args.graph_draws, label_draws=args.label_draws,
            fraction=args.fraction, mu_grid=mu_grid, seed=seed,
            jobs=args.jobs, out_dir=args.out,
        )
        return EXIT_OK
    raise ParameterError("experiment needs --plan or the planted-partition form")


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgpr",
        description="Graph semi-supervised learning on Laplacian-power graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="KNN Gaussian-kernel graph from features")
    p.add_argument("--points", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_graph)

    p = sub.add_parser("solve", help="diffusion scores (optionally sweep-cut)")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--multiclass", action="store_true")
    p.add_argument("--sweep", metavar="PATH", help="also write the sweep-cut CSV")
    p.add_argument("--target-class", type=int, default=0)
    p.add_argument("--dump-lgamma", metavar="PATH", help="dump L^gamma as dense CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate-gamma", help="walk-based exponent estimation")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--target-class", type=int, default=0)
    p.add_argument("--grid", help="start:stop:step (default 1:7:0.2)")
    p.add_argument("--out-curve")
    p.add_argument("--out-summary")
    p.set_defaults(func=cmd_estimate_gamma)

    p = sub.add_parser("cheeger-curve", help="ground-truth curve with subset removals")
    p.add_argument("--graph", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--target-class", type=int, default=0)
    p.add_argument("--grid", help="start:stop:step (default 1:7:0.2)")
    p.add_argument("--removals", help="comma list of removal fractions")
    p.add_argument("--subset-draws", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cheeger_curve)

    p = sub.add_parser("synth", help="synthetic dataset generation")
    p.add_argument("generator", choices=["planted-partition"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p-in", type=float, required=True)
    p.add_argument("--p-out", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("experiment", help="run an experiment plan or ratio sweep")
    p.add_argument("generator", nargs="?", choices=["planted-partition"])
    p.add_argument("--plan")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--ratio-sweep", help="start:stop:step over c_out/c_in")
    p.add_argument("--n", type=int, default=250)
    p.add_argument("--c-avg", type=float, default=3.0)
    p.add_argument("--gammas", default="1,2,6")
    p.add_argument("--fraction", type=float, default=0.01)
    p.add_argument("--graph-draws", type=int, default=10)
    p.add_argument("--label-draws", type=int, default=5)
    p.add_argument("--mu-grid", help="start:stop:count, log spaced")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed a usage message
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
