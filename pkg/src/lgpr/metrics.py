"""Partition quality metrics on signed power graphs.

The generalized Cheeger ratio divides the signed cut weight between a
set and its complement by the smaller generalized volume. The cut
weight equals the quadratic form 1_S^T L^gamma 1_S, which this module
evaluates in the eigenbasis: a sum of non-negative terms, so the PSD
lower bound holds by construction instead of by clamping.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, NumericalError, ParameterError
from .graph import Graph, NodeSet, degree_vector
from .spectral import SignedGraph, SpectralDecomposition

# Quadratic-form results computed through the materialized matrix may
# dip slightly negative; within NUMERATOR_TOL of zero they are clamped,
# below it the PSD property is considered violated.
NUMERATOR_TOL = 1e-8


@dataclass(frozen=True)
class CutDecomposition:
    """Signed-edge totals: agreements/disagreements inside and across S.

    All four fields are sums of absolute weights over ordered pairs, so
    within-set totals count each undirected edge twice while cross
    totals count it once.
    """

    a_in: float
    a_out: float
    d_in: float
    d_out: float


@dataclass(frozen=True)
class CheegerReport:
    gamma: float
    set_volume: float
    complement_volume: float
    ratio: float


def _check_proper_subset(s: NodeSet, n: int) -> None:
    s.validate_within(n)
    if len(s) == 0 or len(s) == n:
        raise ParameterError("set must be a nonempty proper subset of the nodes")


def guard_numerator(value: float) -> float:
    """Apply the PSD clamp convention to a cut-weight numerator."""
    if value < -NUMERATOR_TOL:
        raise NumericalError(
            f"cut numerator {value} violates positive semi-definiteness"
        )
    return max(value, 0.0)


def spectral_cut_numerator(sg: SignedGraph, ind: np.ndarray) -> float:
    """1_S^T L^gamma 1_S via the eigenbasis (non-negative by construction)."""
    coeff = sg.spectrum.eigenvectors.T @ ind
    return float(np.dot(sg.powered_eigenvalues(), coeff * coeff))


def cheeger_ratio(sg: SignedGraph, s: NodeSet) -> CheegerReport:
    """Generalized Cheeger ratio of ``s`` on the L^gamma graph.

    At gamma = 1 this is the classical conductance.
    """
    _check_proper_subset(s, sg.n)
    ind = s.indicator(sg.n)
    num = guard_numerator(spectral_cut_numerator(sg, ind))
    vol_s = float(sg.gen_degree[s.sorted()].sum())
    vol_c = float(sg.gen_degree.sum()) - vol_s
    den = min(vol_s, vol_c)
    if den <= 0:
        raise DegenerateError("set or complement has zero generalized volume")
    return CheegerReport(
        gamma=sg.gamma, set_volume=vol_s, complement_volume=vol_c, ratio=num / den
    )


def cut_decomposition(sg: SignedGraph, s: NodeSet) -> CutDecomposition:
    """Split the signed adjacency around ``s`` by edge sign and side."""
    _check_proper_subset(s, sg.n)
    inside = np.zeros(sg.n, dtype=bool)
    inside[s.sorted()] = True
    W = sg.signed_adjacency
    pos = np.clip(W, 0.0, None)
    neg = -np.clip(W, None, 0.0)
    a_in = float(pos[np.ix_(inside, inside)].sum())
    a_out = float(pos[np.ix_(inside, ~inside)].sum())
    d_in = float(neg[np.ix_(inside, inside)].sum())
    d_out = float(neg[np.ix_(inside, ~inside)].sum())
    guard_numerator(a_out - d_out)
    return CutDecomposition(a_in=a_in, a_out=a_out, d_in=d_in, d_out=d_out)


def cheeger_curve(
    decomp: SpectralDecomposition, s: NodeSet, gammas: np.ndarray
) -> np.ndarray:
    """Generalized Cheeger ratio of ``s`` for every exponent in ``gammas``.

    Shares one eigendecomposition across the grid; each evaluation is
    O(n) once the per-eigenvector weights of ``s`` are accumulated.
    """
    _check_proper_subset(s, decomp.n)
    ind = s.indicator(decomp.n)
    Q = decomp.eigenvectors
    cut_w = (Q.T @ ind) ** 2  # numerator weights per eigenvalue
    vol_w = (Q * Q * ind[:, None]).sum(axis=0)  # set-volume weights
    tot_w = (Q * Q).sum(axis=0)  # == 1 per eigenvector, kept for clarity
    out = np.empty(len(gammas))
    for i, gamma in enumerate(gammas):
        if not gamma > 0:
            raise ParameterError(f"gamma must be positive, got {gamma}")
        powered = decomp.eigenvalues ** float(gamma)
        num = float(np.dot(powered, cut_w))
        vol_s = float(np.dot(powered, vol_w))
        vol_g = float(np.dot(powered, tot_w))
        den = min(vol_s, vol_g - vol_s)
        if den <= 0:
            raise DegenerateError("zero generalized volume along the curve")
        out[i] = num / den
    return out


def sbm_expected_cheeger(p_in: float, p_out: float, order: int) -> float:
    """Large-n expected Cheeger ratio of a planted partition's block.

    order 1 gives p_out / (p_in + p_out); order 2 gives twice its
    square (the second-power graph limit).
    """
    if not (0 <= p_in <= 1 and 0 <= p_out <= 1):
        raise ParameterError("p_in and p_out must lie in [0, 1]")
    if order not in (1, 2):
        raise ParameterError(f"order must be 1 or 2, got {order}")
    if p_in + p_out == 0:
        raise DegenerateError("p_in + p_out must be positive")
    h1 = p_out / (p_in + p_out)
    return h1 if order == 1 else 2.0 * h1 * h1


def l2_improvement_condition(g: Graph, s: NodeSet) -> tuple[bool, float]:
    """Sufficient condition for the squared graph to improve the ratio.

    Holds when the mean degree inside ``s`` is at least the largest
    outward boundary weight of any node in ``s`` plus the largest
    inward boundary weight of any outside node. Returns the verdict and
    the margin (lhs - rhs).
    """
    _check_proper_subset(s, g.n)
    inside = np.zeros(g.n, dtype=bool)
    inside[s.sorted()] = True
    W = g.dense_weights()
    mean_deg = float(degree_vector(g)[inside].mean())
    out_rows = W[np.ix_(inside, ~inside)]
    max_out = float(out_rows.sum(axis=1).max())
    max_in = float(out_rows.sum(axis=0).max())
    margin = mean_deg - (max_out + max_in)
    return margin >= 0.0, margin
