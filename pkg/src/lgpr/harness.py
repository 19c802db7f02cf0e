"""Experiment orchestration: grids, repetitions, MCC scoring.

Protocol note: the best score over the mu grid is retained per cell
using the ground truth. That mirrors the evaluation protocol of the
benchmark experiments -- it is NOT a deployable model-selection rule.

Nodes of zero degree cannot take part in the diffusion (their
generalized degree vanishes), so each run solves on the positive-degree
subgraph and maps predictions back: dropped nodes default to class 0 in
multiclass mode and to non-membership in sweep mode. Scoring always
covers the full node set.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError
from .graph import Graph, NodeSet, build_knn_graph, degree_vector
from .io import load_edge_csv, load_features_csv, load_labels_csv, _fmt
from .metrics import cheeger_curve
from .pagerank import DiffusionSolver, sweep_cut
from .spectral import SpectralDecomposition, decompose, lgamma_graph
from .synth import (
    PlantedPartitionConfig,
    config_from_degree_ratio,
    detectability_margin,
    generate_planted_partition,
    sample_labels,
)


# --------------------------------------------------------------------------
# scoring
# --------------------------------------------------------------------------

def mcc(predicted, truth) -> float:
    """Matthews correlation coefficient over class-label vectors.

    Uses the generalized multi-class form, which reduces to the
    familiar confusion-matrix formula for two classes. A zero
    denominator (e.g. a constant prediction) scores 0.
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise ParameterError("predicted and truth must be equal-length vectors")
    labels, flat = np.unique(np.concatenate([truth, predicted]), return_inverse=True)
    k = len(labels)
    t_idx, p_idx = flat[: len(truth)], flat[len(truth):]
    confusion = np.bincount(t_idx * k + p_idx, minlength=k * k).reshape(k, k).astype(float)
    total = confusion.sum()
    correct = np.trace(confusion)
    pred_counts = confusion.sum(axis=0)
    true_counts = confusion.sum(axis=1)
    cov = correct * total - float(pred_counts @ true_counts)
    var_pred = total**2 - float(pred_counts @ pred_counts)
    var_true = total**2 - float(true_counts @ true_counts)
    denom = np.sqrt(var_pred) * np.sqrt(var_true)
    return 0.0 if denom == 0 else float(cov / denom)


def mcc_sets(predicted: NodeSet, truth: NodeSet, n: int) -> float:
    """Binary MCC between a predicted and a ground-truth node set."""
    pred = predicted.indicator(n).astype(int)
    true = truth.indicator(n).astype(int)
    return mcc(pred, true)


# --------------------------------------------------------------------------
# plans
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PlantedPartitionData:
    n: int
    p_in: float
    p_out: float


@dataclass(frozen=True)
class FileData:
    edges: str
    truth: str


@dataclass(frozen=True)
class FeatureData:
    points: str
    truth: str
    k: int
    sigma: float


def default_mu_grid() -> tuple:
    """20 logarithmically spaced restart strengths in [1e-3, 1e2]."""
    return tuple(float(m) for m in np.logspace(-3.0, 2.0, 20))


@dataclass(frozen=True)
class ExperimentPlan:
    dataset: object
    gammas: tuple
    mu_grid: tuple
    label_fractions: tuple
    label_scheme: str = "uniform"
    graph_draws: int = 1
    label_draws: int = 1
    seed: int = 0
    mode: str = "sweep"

    def __post_init__(self):
        if not self.mu_grid or any(m <= 0 for m in self.mu_grid):
            raise ParameterError("mu grid must be nonempty with positive entries")
        if not self.gammas or any(g <= 0 for g in self.gammas):
            raise ParameterError("gamma list must be nonempty with positive entries")
        if self.graph_draws < 1 or self.label_draws < 1:
            raise ParameterError("repetitions must be >= 1")
        if self.mode not in ("sweep", "multiclass"):
            raise ParameterError(f"mode must be 'sweep' or 'multiclass', got {self.mode!r}")
        if not isinstance(self.dataset, PlantedPartitionData) and self.graph_draws != 1:
            raise ParameterError("file-backed datasets admit exactly one graph draw")
        if not self.label_fractions:
            raise ParameterError("at least one label fraction is required")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentPlan":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"plan is not valid JSON: {exc}") from exc
        try:
            ds_raw = dict(raw["dataset"])
            kind = ds_raw.pop("kind")
            if kind == "planted-partition":
                if "ratio" in ds_raw:
                    cfg = config_from_degree_ratio(
                        n=int(ds_raw["n"]), c_avg=float(ds_raw["c_avg"]),
                        ratio=float(ds_raw["ratio"]),
                    )
                    dataset = PlantedPartitionData(n=cfg.n, p_in=cfg.p_in, p_out=cfg.p_out)
                else:
                    dataset = PlantedPartitionData(
                        n=int(ds_raw["n"]), p_in=float(ds_raw["p_in"]),
                        p_out=float(ds_raw["p_out"]),
                    )
            elif kind == "files":
                dataset = FileData(edges=ds_raw["edges"], truth=ds_raw["truth"])
            elif kind == "features":
                dataset = FeatureData(
                    points=ds_raw["points"], truth=ds_raw["truth"],
                    k=int(ds_raw["k"]), sigma=float(ds_raw["sigma"]),
                )
            else:
                raise DataError(f"unknown dataset kind {kind!r}")
            mu_raw = raw.get("mu_grid")
            if mu_raw is None:
                mu_grid = default_mu_grid()
            elif isinstance(mu_raw, dict):
                mu_grid = tuple(
                    float(m) for m in np.logspace(
                        np.log10(float(mu_raw["start"])),
                        np.log10(float(mu_raw["stop"])),
                        int(mu_raw["count"]),
                    )
                )
            else:
                mu_grid = tuple(float(m) for m in mu_raw)
            labels = raw.get("labels", {})
            reps = raw.get("repetitions", {})
            return cls(
                dataset=dataset,
                gammas=tuple(float(g) for g in raw["gammas"]),
                mu_grid=mu_grid,
                label_fractions=tuple(float(f) for f in labels.get("fractions", [0.01])),
                label_scheme=labels.get("scheme", "uniform"),
                graph_draws=int(reps.get("graphs", 1)),
                label_draws=int(reps.get("labels", 1)),
                seed=int(raw.get("seed", 0)),
                mode=raw.get("mode", "sweep"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed experiment plan: {exc}") from exc


@dataclass(frozen=True)
class CellScore:
    gamma: float
    rep: int
    best_mu: float
    mcc: float


@dataclass(frozen=True)
class GammaSummary:
    gamma: float
    mean_mcc: float
    ci95: float


@dataclass(frozen=True)
class ScoredRun:
    cells: tuple
    summary: tuple


# --------------------------------------------------------------------------
# execution
# --------------------------------------------------------------------------

def _materialize(plan: ExperimentPlan, draw: int):
    """Return (graph, per-class ground-truth sets) for one graph draw."""
    ds = plan.dataset
    if isinstance(ds, PlantedPartitionData):
        cfg = PlantedPartitionConfig(n=ds.n, p_in=ds.p_in, p_out=ds.p_out)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=plan.seed, spawn_key=(draw,))
        )
        graph, truth = generate_planted_partition(cfg, rng)
        return graph, [truth, truth.complement(graph)]
    if isinstance(ds, FileData):
        graph = load_edge_csv(ds.edges)
        classes = load_labels_csv(ds.truth)
    else:
        points = load_features_csv(ds.points)
        graph = build_knn_graph(points, k=ds.k, sigma=ds.sigma)
        classes = load_labels_csv(ds.truth)
    if sum(len(c) for c in classes) != graph.n:
        raise DataError("ground-truth classes must cover every node exactly once")
    return graph, classes


def _truth_vector(classes, n: int) -> np.ndarray:
    truth = np.zeros(n, dtype=int)
    for k, cls in enumerate(classes):
        truth[cls.sorted()] = k
    return truth


def _graph_draw_cells(args) -> list:
    plan, draw = args
    graph, classes = _materialize(plan, draw)
    if plan.mode == "multiclass" and len(plan.label_fractions) != len(classes):
        raise ParameterError(
            f"multiclass mode needs one label fraction per class "
            f"({len(classes)} classes, {len(plan.label_fractions)} fractions)"
        )
    n = graph.n
    deg = degree_vector(graph)
    keep = np.flatnonzero(deg > 0)
    if len(keep) == 0:
        raise DataError("graph has no edges at all")
    sub = graph.subgraph(keep) if len(keep) < n else graph
    position = -np.ones(n, dtype=int)
    position[keep] = np.arange(len(keep))
    decomp = decompose(sub)
    truth_vec = _truth_vector(classes, n)
    truth_set = classes[0]

    samples = []
    for ld in range(plan.label_draws):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=plan.seed, spawn_key=(draw, ld))
        )
        fractions = plan.label_fractions
        wanted = classes[: len(fractions)]
        samples.append(
            sample_labels(wanted, fractions, scheme=plan.label_scheme, rng=rng, degrees=deg)
        )

    cells = []
    for gamma in plan.gammas:
        sg = lgamma_graph(decomp, gamma)
        best = {ld: (-2.0, None) for ld in range(plan.label_draws)}
        for mu in plan.mu_grid:
            solver = DiffusionSolver(sg, mu)
            for ld, sample in enumerate(samples):
                score = _score_cell(
                    plan, solver, sg, sample, keep, position, n, truth_vec, truth_set
                )
                if score > best[ld][0]:
                    best[ld] = (score, mu)
        for ld in range(plan.label_draws):
            score, mu = best[ld]
            cells.append(
                CellScore(
                    gamma=float(gamma),
                    rep=draw * plan.label_draws + ld,
                    best_mu=float(mu),
                    mcc=score,
                )
            )
    return cells


def _restrict(nodes: NodeSet, position: np.ndarray, size: int) -> np.ndarray:
    y = np.zeros(size)
    for u in nodes.sorted():
        if position[u] >= 0:
            y[position[u]] = 1.0
    return y


def _score_cell(plan, solver, sg, sample, keep, position, n, truth_vec, truth_set):
    if plan.mode == "sweep":
        y = _restrict(sample.classes[0], position, sg.n)
        if not y.any():
            return 0.0  # every labeled node was isolated
        f = solver.solve(y)
        result = sweep_cut(sg, f)
        predicted = NodeSet.of(int(keep[u]) for u in result.best_set)
        return mcc_sets(predicted, truth_set, n)
    columns = []
    for cls in sample.classes:
        y = _restrict(cls, position, sg.n)
        columns.append(solver.solve(y).values if y.any() else np.zeros(sg.n))
    scores = np.column_stack(columns)
    predicted = np.zeros(n, dtype=int)  # dropped nodes default to class 0
    predicted[keep] = np.argmax(scores, axis=1)
    return mcc(predicted, truth_vec)


def run_experiment(plan: ExperimentPlan, out_dir=None, jobs: int = 1) -> ScoredRun:
    """Execute a plan; optionally write results.csv and summary.csv.

    Graph draws are independent jobs; results are reduced in sorted
    cell order so serial and parallel runs emit identical bytes.
    """
    tasks = [(plan, draw) for draw in range(plan.graph_draws)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_graph_draw_cells, tasks))
    else:
        chunks = [_graph_draw_cells(t) for t in tasks]
    cells = sorted(
        (c for chunk in chunks for c in chunk), key=lambda c: (c.gamma, c.rep)
    )
    summary = []
    for gamma in plan.gammas:
        vals = np.array([c.mcc for c in cells if c.gamma == float(gamma)])
        ci = 1.96 * vals.std(ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else 0.0
        summary.append(
            GammaSummary(gamma=float(gamma), mean_mcc=float(vals.mean()), ci95=float(ci))
        )
    run = ScoredRun(cells=tuple(cells), summary=tuple(summary))
    if out_dir is not None:
        write_run_csv(run, out_dir)
    return run


def write_run_csv(run: ScoredRun, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "results.csv"), "w", newline="") as fh:
        fh.write("gamma,rep,best_mu,mcc\n")
        for c in run.cells:
            fh.write(f"{_fmt(c.gamma)},{c.rep},{_fmt(c.best_mu)},{_fmt(c.mcc)}\n")
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        fh.write("gamma,mean_mcc,ci95\n")
        for s in run.summary:
            fh.write(f"{_fmt(s.gamma)},{_fmt(s.mean_mcc)},{_fmt(s.ci95)}\n")


# --------------------------------------------------------------------------
# curve experiments
# --------------------------------------------------------------------------

def cheeger_curve_experiment(
    graph: Graph,
    truth: NodeSet,
    gammas: np.ndarray,
    removal_fractions=(0.1, 0.2, 0.3),
    draws: int = 20,
    seed: int = 0,
    out_path=None,
    decomp: SpectralDecomposition | None = None,
) -> np.ndarray:
    """Ground-truth Cheeger curve plus mean curves on random subsets.

    For each removal fraction, ``draws`` random subsets of ``truth``
    (that fraction of members zeroed out) are evaluated and averaged.
    Returns a table with columns gamma, full curve, one mean column per
    fraction; optionally written as CSV.
    """
    if any(not 0 < f < 1 for f in removal_fractions):
        raise ParameterError("removal fractions must lie in (0, 1)")
    if decomp is None:
        decomp = decompose(graph)
    gammas = np.asarray(gammas, dtype=float)
    full = cheeger_curve(decomp, truth, gammas)
    members = truth.sorted()
    columns = [gammas, full]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0,)))
    for frac in removal_fractions:
        drop = int(round(frac * len(members)))
        acc = np.zeros(len(gammas))
        for _ in range(draws):
            removed = rng.choice(members, size=drop, replace=False)
            subset = NodeSet.of(set(members.tolist()) - set(removed.tolist()))
            acc += cheeger_curve(decomp, subset, gammas)
        columns.append(acc / draws)
    table = np.column_stack(columns)
    if out_path is not None:
        header = ["gamma", "h_full"] + [
            f"h_remove_{int(round(100 * f))}" for f in removal_fractions
        ]
        with open(out_path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in table:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
    return table


def ratio_sweep_experiment(
    n: int,
    c_avg: float,
    ratios,
    gammas,
    graph_draws: int,
    label_draws: int,
    fraction: float,
    mu_grid=None,
    seed: int = 0,
    jobs: int = 1,
    out_dir=None,
) -> list:
    """Planted-partition sweep over c_out / c_in ratios.

    Runs one sweep-cut experiment per ratio and returns rows of
    (ratio, detectability margin, gamma, mean MCC, ci95).
    """
    mu_grid = tuple(mu_grid) if mu_grid is not None else default_mu_grid()
    rows = []
    for ratio in ratios:
        cfg = config_from_degree_ratio(n=n, c_avg=c_avg, ratio=float(ratio))
        margin = detectability_margin(cfg)
        plan = ExperimentPlan(
            dataset=PlantedPartitionData(n=n, p_in=cfg.p_in, p_out=cfg.p_out),
            gammas=tuple(float(g) for g in gammas),
            mu_grid=mu_grid,
            label_fractions=(float(fraction),),
            graph_draws=graph_draws,
            label_draws=label_draws,
            seed=seed,
            mode="sweep",
        )
        run = run_experiment(plan, jobs=jobs)
        for s in run.summary:
            rows.append((float(ratio), margin, s.gamma, s.mean_mcc, s.ci95))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "ratio_sweep.csv"), "w", newline="") as fh:
            fh.write("ratio,margin,gamma,mean_mcc,ci95\n")
            for rt, mg, gm, mean, ci in rows:
                fh.write(f"{_fmt(rt)},{_fmt(mg)},{_fmt(gm)},{_fmt(mean)},{_fmt(ci)}\n")
    return rows
