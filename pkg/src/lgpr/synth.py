"""Planted-partition generation and labeled-point sampling.

Randomness discipline: every public generator takes either an integer
seed or a ``numpy.random.Generator``. Ensemble code derives one child
stream per (graph draw, label draw) with
``SeedSequence(entropy=seed, spawn_key=(graph_draw,))`` and
``spawn_key=(graph_draw, label_draw)``, so runs replay exactly and
cells stay independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, ParameterError
from .graph import Graph, NodeSet


@dataclass(frozen=True)
class PlantedPartitionConfig:
    """Two equal blocks of ``n`` nodes; unit-weight Bernoulli edges.

    ``p_in`` connects same-block pairs, ``p_out`` cross-block pairs.
    """

    n: int
    p_in: float
    p_out: float
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"per-cluster size must be >= 2, got {self.n}")
        if not (0 <= self.p_in <= 1 and 0 <= self.p_out <= 1):
            raise ParameterError("edge probabilities must lie in [0, 1]")

    @property
    def c_in(self) -> float:
        """Mean intra-cluster degree p_in (n - 1)."""
        return self.p_in * (self.n - 1)

    @property
    def c_out(self) -> float:
        """Mean inter-cluster degree p_out n."""
        return self.p_out * self.n

    @property
    def c_avg(self) -> float:
        return self.c_in + self.c_out


def config_from_degree_ratio(
    n: int, c_avg: float, ratio: float, seed: int = 0
) -> PlantedPartitionConfig:
    """Config with mean degree ``c_avg`` split so c_out / c_in = ratio."""
    if c_avg <= 0 or ratio < 0:
        raise ParameterError("c_avg must be positive and ratio non-negative")
    c_in = c_avg / (1.0 + ratio)
    c_out = c_avg - c_in
    return PlantedPartitionConfig(n=n, p_in=c_in / (n - 1), p_out=c_out / n, seed=seed)


def generate_planted_partition(
    cfg: PlantedPartitionConfig, rng: np.random.Generator | None = None
) -> tuple[Graph, NodeSet]:
    """Draw a realization; ground truth is the first ``n`` node ids.

    Disconnected outputs are allowed; callers that need connectivity
    must filter or raise themselves.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n, total = cfg.n, 2 * cfg.n
    draws = rng.random((total, total))
    probs = np.full((total, total), cfg.p_out)
    probs[:n, :n] = cfg.p_in
    probs[n:, n:] = cfg.p_in
    upper = np.triu(draws < probs, k=1).astype(float)
    return Graph(upper + upper.T), NodeSet.of(range(n))


def detectability_margin(cfg: PlantedPartitionConfig) -> float:
    """(c_in - c_out)^2 - 2 (c_in + c_out); positive means detectable."""
    return (cfg.c_in - cfg.c_out) ** 2 - 2.0 * (cfg.c_in + cfg.c_out)


def critical_ratio(c_avg: float) -> float:
    """The c_out / c_in ratio where the detectability margin vanishes.

    Solving (c_in - c_out)^2 = 2 c_avg under c_in + c_out = c_avg gives
    ratio = (1 - s) / (1 + s) with s = sqrt(2 / c_avg); defined for
    c_avg > 2 (below that even ratio 0 is undetectable).
    """
    if c_avg <= 2.0:
        raise ParameterError("no detectable regime exists for c_avg <= 2")
    s = math.sqrt(2.0 / c_avg)
    return (1.0 - s) / (1.0 + s)


@dataclass(frozen=True)
class LabeledSample:
    """Per-class labeled node sets plus the sampling scheme tag."""

    classes: tuple
    scheme: str


def sample_labels(
    ground_truth_classes,
    fractions,
    scheme: str = "uniform",
    rng: np.random.Generator | None = None,
    degrees: np.ndarray | None = None,
) -> LabeledSample:
    """Sample labeled nodes from each ground-truth class.

    Counts are ceil(fraction * class size), so small fractions never
    produce an empty sample. ``scheme`` is ``"uniform"`` (without
    replacement) or ``"degree"`` (probability proportional to
    ``degrees``, without replacement).
    """
    if rng is None:
        rng = np.random.default_rng()
    if scheme not in ("uniform", "degree"):
        raise ParameterError(f"unknown sampling scheme {scheme!r}")
    if scheme == "degree" and degrees is None:
        raise ParameterError("degree-proportional sampling needs a degree vector")
    classes = list(ground_truth_classes)
    fractions = list(fractions)
    if len(fractions) != len(classes):
        raise ParameterError(
            f"{len(fractions)} fractions for {len(classes)} classes"
        )
    sampled = []
    for cls, frac in zip(classes, fractions):
        if not 0 < frac <= 1:
            raise ParameterError(f"label fraction must lie in (0, 1], got {frac}")
        members = cls.sorted()
        count = math.ceil(frac * len(members))
        if count > len(members):
            raise ParameterError(f"cannot sample {count} from class of {len(members)}")
        if scheme == "uniform":
            chosen = rng.choice(members, size=count, replace=False)
        else:
            weights = np.asarray(degrees, dtype=float)[members]
            if weights.sum() <= 0:
                raise DegenerateError("class has zero total degree")
            chosen = rng.choice(members, size=count, replace=False, p=weights / weights.sum())
        sampled.append(NodeSet.of(chosen))
    return LabeledSample(classes=tuple(sampled), scheme=scheme)
