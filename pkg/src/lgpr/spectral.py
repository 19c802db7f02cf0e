"""Laplacian eigendecomposition and signed power graphs.

Raising the combinatorial Laplacian L = D - W to a real power gamma > 0
yields L^gamma = D_gamma - W_gamma: a new graph whose adjacency W_gamma
may carry negative edges once gamma exceeds 1. This module materializes
that graph together with its generalized degrees, volumes and
stationary distribution.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateError, NumericalError, ParameterError
from .graph import Graph, NodeSet, degree_vector

# Eigenvalues below EPS_CLIP_REL * lambda_max are clipped to exactly 0:
# L is PSD in exact arithmetic, and fractional powers of round-off
# negatives would produce NaNs.
EPS_CLIP_REL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full eigendecomposition L = Q diag(eigenvalues) Q^T.

    ``eigenvalues`` are ascending and non-negative (tiny ones clipped to
    exactly 0); columns of ``eigenvectors`` are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class SignedGraph:
    """The graph encoded by L^gamma, with cached spectral factors.

    ``gen_degree`` holds the diagonal of L^gamma (always non-negative),
    ``lgamma_matrix`` the full operator, and ``spectrum`` the eigenpairs
    it was built from (kept so quadratic forms can be evaluated in the
    eigenbasis, which is free of cancellation).
    """

    gamma: float
    lgamma_matrix: np.ndarray
    gen_degree: np.ndarray
    spectrum: SpectralDecomposition

    @property
    def n(self) -> int:
        return self.gen_degree.shape[0]

    @cached_property
    def signed_adjacency(self) -> np.ndarray:
        """W_gamma: negated off-diagonal of L^gamma, zero diagonal."""
        W = -self.lgamma_matrix.copy()
        np.fill_diagonal(W, 0.0)
        return W

    def powered_eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues**self.gamma


@dataclass(frozen=True)
class StationaryDistribution:
    """Generalized stationary distribution: gen_degree / total volume."""

    probabilities: np.ndarray


def decompose(g: Graph) -> SpectralDecomposition:
    """Eigendecompose the combinatorial Laplacian of ``g``.

    Always dense: fractional powers weight the whole spectrum, and the
    target scales make a full decomposition cheap. Sparse-stored graphs
    are densified here.
    """
    W = g.dense_weights()
    L = np.diag(degree_vector(g)) - W
    try:
        lam, Q = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed for n={g.n}: {exc}") from exc
    eps = EPS_CLIP_REL * max(float(lam[-1]), 0.0)
    lam = np.where(lam < eps, 0.0, lam)
    return SpectralDecomposition(eigenvalues=lam, eigenvectors=Q)


def lgamma_graph(decomp: SpectralDecomposition, gamma: float) -> SignedGraph:
    """Materialize the signed graph encoded by L^gamma.

    L^gamma is rebuilt as Q diag(lambda^gamma) Q^T (0^gamma := 0), then
    symmetrized and projected so its row sums vanish exactly -- the
    exact operator satisfies L^gamma 1 = 0, and enforcing it keeps the
    diffusion solver mass-preserving. Generalized degrees come from the
    eigenbasis as sums of non-negative terms.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    lam = decomp.eigenvalues**float(gamma)
    Q = decomp.eigenvectors
    M = (Q * lam) @ Q.T
    M = (M + M.T) / 2.0
    n = decomp.n
    r = M.sum(axis=1)
    M -= (r[:, None] + r[None, :]) / n
    M += r.sum() / n**2
    gen_degree = np.einsum("ij,j,ij->i", Q, lam, Q)
    return SignedGraph(
        gamma=float(gamma), lgamma_matrix=M, gen_degree=gen_degree, spectrum=decomp
    )


def generalized_volume(sg: SignedGraph, s: NodeSet) -> float:
    """Sum of generalized degrees over ``s``."""
    s.validate_within(sg.n)
    if not len(s):
        return 0.0
    return float(sg.gen_degree[s.sorted()].sum())


def total_generalized_volume(sg: SignedGraph) -> float:
    return float(sg.gen_degree.sum())


def generalized_stationary(sg: SignedGraph) -> StationaryDistribution:
    """Distribution proportional to the generalized degrees.

    Raises DegenerateError for edgeless graphs (zero total volume).
    """
    total = total_generalized_volume(sg)
    if total <= 0:
        raise DegenerateError("total generalized volume is zero (edgeless graph)")
    return StationaryDistribution(probabilities=sg.gen_degree / total)
