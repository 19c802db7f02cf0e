"""Diffusion solver on signed power graphs, with sweep-cut partitioning.

The score vector solves (L^gamma D_gamma^{-1} + mu I) f = mu y. The
operator is similar to the symmetric positive semi-definite matrix
D_gamma^{-1/2} L^gamma D_gamma^{-1/2}, so the system is solved in that
form with a Cholesky factorization plus iterative refinement; the
factorization can be reused across seed vectors at fixed (gamma, mu).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DegenerateError, NumericalError, ParameterError
from .graph import Graph, NodeSet, degree_vector
from .metrics import cheeger_ratio, cut_decomposition
from .spectral import SignedGraph, generalized_volume, total_generalized_volume

# Generalized degrees below EPS_DEG_REL * max degree abort rather than
# amplify noise through D_gamma^{-1}.
EPS_DEG_REL = 1e-12

RESIDUAL_RTOL = 1e-8
_MAX_REFINE = 6


@dataclass(frozen=True)
class SeedVector:
    """Non-negative restart distribution with a provenance tag."""

    values: np.ndarray
    provenance: str = "custom"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ParameterError("seed vector must be 1-d")
        if (v < 0).any():
            raise ParameterError("seed vector entries must be non-negative")
        if not v.any():
            raise ParameterError("seed vector must not be all zero")

    @classmethod
    def from_node_set(cls, s: NodeSet, n: int) -> "SeedVector":
        return cls(values=s.indicator(n), provenance="labeled-set indicator")

    @classmethod
    def stationary(cls, sg: SignedGraph) -> "SeedVector":
        total = total_generalized_volume(sg)
        if total <= 0:
            raise DegenerateError("zero total generalized volume")
        return cls(values=sg.gen_degree / total, provenance="stationary distribution")

    @classmethod
    def degree_weighted(cls, sg: SignedGraph, s: NodeSet) -> "SeedVector":
        vol = generalized_volume(sg, s)
        if vol <= 0:
            raise DegenerateError("set has zero generalized volume")
        values = np.where(s.indicator(sg.n) > 0, sg.gen_degree, 0.0) / vol
        return cls(values=values, provenance="degree-proportional over set")


@dataclass(frozen=True)
class ScoreVector:
    values: np.ndarray
    mu: float
    gamma: float
    seed: np.ndarray

    @property
    def alpha(self) -> float:
        """Continuation probability 1 / (1 + mu) of the restart walk."""
        return 1.0 / (1.0 + self.mu)


@dataclass(frozen=True)
class LabelAssignment:
    """Per-class labeled node sets; class k is ``classes[k]``."""

    classes: tuple

    def __post_init__(self):
        seen = set()
        for k, s in enumerate(self.classes):
            if len(s) == 0:
                raise ParameterError(f"class {k} has no labeled nodes")
            overlap = seen & s.members
            if overlap:
                raise ParameterError(f"node {min(overlap)} labeled in two classes")
            seen |= s.members

    @classmethod
    def of(cls, sets) -> "LabelAssignment":
        return cls(classes=tuple(sets))

    @property
    def k(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class ScoreMatrix:
    scores: np.ndarray  # (n, K)
    mu: float
    gamma: float

    @property
    def assignments(self) -> np.ndarray:
        """Row-wise arg-max class; ties go to the lowest class id."""
        return np.argmax(self.scores, axis=1)


@dataclass(frozen=True)
class SweepCutResult:
    """Sweep over prefixes of the descending q = f / gen_degree order.

    ``prefix_ratios[j-1]`` is the generalized Cheeger ratio of the first
    j nodes of ``permutation`` (j = 1 .. n-1); ``best_index`` is the
    minimizing j, ``best_set`` that prefix and ``tau`` its ratio. Ties
    in q are broken by ascending node id, ties in the ratio by the
    smallest prefix.
    """

    permutation: np.ndarray
    q_values: np.ndarray
    prefix_ratios: np.ndarray
    best_index: int
    best_set: NodeSet
    tau: float


@dataclass(frozen=True)
class SharpDropReport:
    """Both sides of the sweep-prefix inequality and their slacks."""

    holds: bool
    lower: float
    middle: float
    upper: float
    lower_slack: float
    upper_slack: float


class DiffusionSolver:
    """Factorization of (L^gamma D_gamma^{-1} + mu I), reusable across seeds."""

    def __init__(self, sg: SignedGraph, mu: float):
        if not mu > 0:
            raise ParameterError(f"mu must be positive, got {mu}")
        dg = sg.gen_degree
        if (dg <= EPS_DEG_REL * dg.max()).any():
            bad = int(np.argmin(dg))
            raise DegenerateError(
                f"generalized degree of node {bad} is numerically zero at gamma={sg.gamma}"
            )
        self.sg = sg
        self.mu = float(mu)
        self._scale = 1.0 / np.sqrt(dg)
        sym = self._scale[:, None] * sg.lgamma_matrix * self._scale[None, :]
        sym = (sym + sym.T) / 2.0
        sym[np.diag_indices_from(sym)] += self.mu
        try:
            self._factor = cho_factor(sym, lower=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"factorization failed at mu={mu}: {exc}") from exc

    def solve(self, y) -> ScoreVector:
        seed = y.values if isinstance(y, SeedVector) else np.asarray(y, dtype=float)
        if seed.shape != (self.sg.n,):
            raise ParameterError(f"seed length {seed.shape} != n={self.sg.n}")
        if (seed < 0).any() or not seed.any():
            raise ParameterError("seed must be non-negative and not all zero")
        mu, sg, s = self.mu, self.sg, self._scale

        def residual_of(vec):
            return mu * seed - (sg.lgamma_matrix @ (vec / sg.gen_degree) + mu * vec)

        f = cho_solve(self._factor, mu * (s * seed)) / s
        target = RESIDUAL_RTOL * np.linalg.norm(mu * seed)
        for _ in range(_MAX_REFINE):
            r = residual_of(f)
            if np.linalg.norm(r) <= target:
                break
            f = f + cho_solve(self._factor, s * r) / s
        else:
            residual = np.linalg.norm(residual_of(f))
            # the residual cannot be evaluated below the rounding of the
            # matvec itself; bound that with pre-cancellation amplitudes
            eps = np.finfo(float).eps
            amplitude = (
                np.abs(sg.lgamma_matrix) @ np.abs(f / sg.gen_degree)
                + mu * np.abs(f)
                + mu * np.abs(seed)
            )
            floor = 8 * sg.n * eps * np.linalg.norm(amplitude)
            if residual > max(target, floor):
                raise NumericalError(
                    f"solver residual {residual:.3e} above tolerance {target:.3e}"
                )
        return ScoreVector(values=f, mu=mu, gamma=sg.gamma, seed=seed.copy())


def solve(sg: SignedGraph, y, mu: float) -> ScoreVector:
    """One-shot diffusion solve; see :class:`DiffusionSolver` for reuse."""
    return DiffusionSolver(sg, mu).solve(y)


def solve_multiclass(sg: SignedGraph, labels: LabelAssignment, mu: float) -> ScoreMatrix:
    """Solve one column per class from its labeled-set indicator."""
    if labels.k < 2:
        raise ParameterError("multiclass solve needs at least 2 classes")
    solver = DiffusionSolver(sg, mu)
    cols = [solver.solve(SeedVector.from_node_set(s, sg.n)).values for s in labels.classes]
    return ScoreMatrix(scores=np.column_stack(cols), mu=float(mu), gamma=sg.gamma)


def sweep_cut(sg: SignedGraph, f) -> SweepCutResult:
    """Evaluate every prefix of the descending q-order and keep the best.

    Prefix cut weights are accumulated in the eigenbasis (O(n) per
    step after the O(n^2) setup), so every numerator is a sum of
    non-negative terms.
    """
    values = f.values if isinstance(f, ScoreVector) else np.asarray(f, dtype=float)
    if values.shape != (sg.n,):
        raise ParameterError(f"score length {values.shape} != n={sg.n}")
    if not np.isfinite(values).all():
        raise ParameterError("scores must be finite")
    n = sg.n
    if n < 2:
        raise ParameterError("sweep cut needs at least 2 nodes")
    with np.errstate(divide="ignore", invalid="ignore"):
        q = values / sg.gen_degree
    if not np.isfinite(q).all():
        raise DegenerateError("zero generalized degree makes q undefined")
    perm = np.argsort(-q, kind="stable")  # ties fall back to ascending id

    powered = sg.powered_eigenvalues()
    coeff = np.cumsum(sg.spectrum.eigenvectors[perm], axis=0)[:-1]
    numerators = np.einsum("jk,k,jk->j", coeff, powered, coeff)
    prefix_vol = np.cumsum(sg.gen_degree[perm])[:-1]
    total = float(sg.gen_degree.sum())
    denom = np.minimum(prefix_vol, total - prefix_vol)
    with np.errstate(divide="ignore"):
        ratios = np.where(denom > 0, numerators / np.where(denom > 0, denom, 1.0), np.inf)
    best = int(np.argmin(ratios))  # first minimum -> smallest prefix
    return SweepCutResult(
        permutation=perm,
        q_values=q[perm],
        prefix_ratios=ratios,
        best_index=best + 1,
        best_set=NodeSet.of(perm[: best + 1]),
        tau=float(ratios[best]),
    )


def escape_mass_bound_check(sg: SignedGraph, s: NodeSet, mu: float) -> tuple[float, float]:
    """Exact expected escaped mass vs its conductance bound.

    Seeds the diffusion with the degree-proportional distribution on
    ``s`` and returns (expected escape, ratio / mu). Requires
    vol_gamma(s) <= vol_gamma(G) / 2.
    """
    s.validate_within(sg.n)
    vol_s = generalized_volume(sg, s)
    if vol_s > total_generalized_volume(sg) / 2.0:
        raise ParameterError("set must have at most half the total generalized volume")
    seed = SeedVector.degree_weighted(sg, s)
    f = solve(sg, seed, mu)
    outside = s.complement(sg.n)
    expected_escape = float(f.values[outside.sorted()].sum()) if len(outside) else 0.0
    bound = cheeger_ratio(sg, s).ratio / mu
    return expected_escape, bound


def sharp_drop_inequality_check(sg: SignedGraph, f: ScoreVector, j: int) -> SharpDropReport:
    """Evaluate the two-sided sweep-prefix inequality at prefix ``j``.

    The normalized restart deficit mu (y(S_j) - f(S_j)) / (q_1 - q_n)
    must lie between combinations of the prefix's outward agreements and
    disagreements weighted by the local drop (q_j - q_{j+1}) relative to
    the full range. Degenerate (constant-q) scores are rejected.
    """
    n = sg.n
    if not 1 <= j <= n - 1:
        raise ParameterError(f"prefix index must be in 1..{n - 1}, got {j}")
    q = f.values / sg.gen_degree
    perm = np.argsort(-q, kind="stable")
    qs = q[perm]
    q_range = float(qs[0] - qs[-1])
    if q_range <= 1e-12 * max(abs(qs[0]), abs(qs[-1]), 1e-300):
        raise DegenerateError("constant q: the inequality is unbounded")
    prefix = NodeSet.of(perm[:j])
    cuts = cut_decomposition(sg, prefix)
    drop = float(qs[j - 1] - qs[j]) / q_range
    ind = prefix.indicator(n)
    middle = f.mu * float(np.dot(ind, f.seed) - np.dot(ind, f.values)) / q_range
    upper = cuts.a_out * (2.0 - drop) - cuts.d_out * (2.0 * drop - 1.0)
    lower = cuts.a_out * (2.0 * drop - 1.0) - cuts.d_out * (2.0 - drop)
    return SharpDropReport(
        holds=(lower <= middle <= upper),
        lower=lower,
        middle=middle,
        upper=upper,
        lower_slack=middle - lower,
        upper_slack=upper - middle,
    )


def sharp_drop_dichotomy(g: Graph, f: ScoreVector, h: float) -> list[str]:
    """Diagnostic for the classical (gamma = 1) sweep dichotomy.

    For each prefix j reports which alternative held: ``"small-cut"``
    when the cut weight is below 2 h vol(S_j), ``"later-rise"`` when a
    later prefix k has vol(S_k) >= (1 + h) vol(S_j) and
    q_k >= q_j - alpha / (h vol(S_j)), ``"both"`` or ``"neither"``.
    Informational only; nothing is enforced.
    """
    if not 0 < h < 1:
        raise ParameterError("h must lie in (0, 1)")
    d = degree_vector(g)
    if (d <= 0).any():
        raise DegenerateError("zero-degree node; classical sweep undefined")
    W = g.dense_weights()
    q = f.values / d
    perm = np.argsort(-q, kind="stable")
    qs = q[perm]
    vols = np.cumsum(d[perm])
    inside = np.zeros(g.n, dtype=bool)
    cut = 0.0
    alpha = f.alpha
    report = []
    for j in range(1, g.n):
        u = perm[j - 1]
        cut += W[u, ~inside].sum() - W[u, inside].sum()
        inside[u] = True
        small_cut = cut < 2.0 * h * vols[j - 1]
        threshold = qs[j - 1] - alpha / (h * vols[j - 1])
        later = np.arange(j, g.n)
        later_rise = bool(
            np.any((vols[later] >= (1.0 + h) * vols[j - 1]) & (qs[later] >= threshold))
        )
        if small_cut and later_rise:
            report.append("both")
        elif small_cut:
            report.append("small-cut")
        elif later_rise:
            report.append("later-rise")
        else:
            report.append("neither")
    return report
