"""Undirected weighted graphs: representation, construction, walks.

Graphs carry a symmetric non-negative adjacency with a zero diagonal.
Adjacency is stored dense up to ``DENSE_LIMIT`` nodes and as scipy CSR
above; every operation accepts either storage.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .errors import DataError, DegenerateError, ParameterError

DENSE_LIMIT = 4096

Adjacency = Union[np.ndarray, sp.csr_matrix]


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph without self-loops.

    Parameters
    ----------
    weights : ndarray or csr_matrix
        Symmetric (n, n) adjacency with non-negative entries and a zero
        diagonal. Node ids are the row indices 0..n-1.
    """

    weights: Adjacency

    def __post_init__(self):
        W = self.weights
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ParameterError(f"adjacency must be square, got shape {W.shape}")
        if sp.issparse(W):
            if (W != W.T).nnz != 0:
                raise ParameterError("adjacency must be symmetric")
            if W.diagonal().any():
                raise ParameterError("adjacency must have a zero diagonal (no self-loops)")
            if W.nnz and W.data.min() < 0:
                raise ParameterError("edge weights must be non-negative")
        else:
            if not np.array_equal(W, W.T):
                raise ParameterError("adjacency must be symmetric")
            if np.diagonal(W).any():
                raise ParameterError("adjacency must have a zero diagonal (no self-loops)")
            if W.size and W.min() < 0:
                raise ParameterError("edge weights must be non-negative")

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def dense_weights(self) -> np.ndarray:
        """Adjacency as a dense float array (copies only when sparse)."""
        W = self.weights
        return W.toarray() if sp.issparse(W) else np.asarray(W, dtype=float)

    def subgraph(self, nodes: np.ndarray) -> "Graph":
        """Induced subgraph on ``nodes`` (ids are re-indexed to 0..len-1)."""
        nodes = np.asarray(sorted(int(u) for u in nodes))
        W = self.weights
        if sp.issparse(W):
            return Graph(W[nodes][:, nodes].tocsr())
        return Graph(W[np.ix_(nodes, nodes)])


@dataclass(frozen=True)
class NodeSet:
    """A set of node ids, complement-able against a graph.

    Construct through :meth:`of` which validates and deduplicates.
    """

    members: frozenset

    def __post_init__(self):
        if any((not isinstance(u, (int, np.integer))) or u < 0 for u in self.members):
            raise ParameterError("node ids must be non-negative integers")

    @classmethod
    def of(cls, nodes: Iterable[int]) -> "NodeSet":
        return cls(frozenset(int(u) for u in nodes))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, u) -> bool:
        return int(u) in self.members

    def sorted(self) -> np.ndarray:
        return np.fromiter(sorted(self.members), dtype=np.int64, count=len(self.members))

    def validate_within(self, n: int) -> None:
        if self.members and max(self.members) >= n:
            raise ParameterError(f"node id {max(self.members)} out of range for n={n}")

    def indicator(self, n: int) -> np.ndarray:
        """0/1 vector of length n marking the members."""
        self.validate_within(n)
        ind = np.zeros(n)
        if self.members:
            ind[self.sorted()] = 1.0
        return ind

    def complement(self, g: "Graph | int") -> "NodeSet":
        n = g if isinstance(g, int) else g.n
        self.validate_within(n)
        return NodeSet(frozenset(range(n)) - self.members)


def validate_features(points: np.ndarray) -> np.ndarray:
    """Check a feature matrix: 2-d, finite, at least one row."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise DataError(f"feature matrix must be 2-d and nonempty, got shape {points.shape}")
    if not np.isfinite(points).all():
        raise DataError("feature matrix contains NaN or infinite entries")
    return points


def build_knn_graph(points: np.ndarray, k: int, sigma: float) -> Graph:
    """Build a union-symmetrized k-nearest-neighbour similarity graph.

    An edge (u, v) exists when v is among u's k nearest points in
    Euclidean distance or vice versa; its weight is the Gaussian kernel
    exp(-||x_u - x_v||^2 / sigma^2). Duplicate points are allowed and
    produce weight 1.

    Parameters
    ----------
    points : (n, d) array
    k : int
        Neighbour count, 1 <= k < n.
    sigma : float
        Kernel bandwidth, > 0.
    """
    points = validate_features(points)
    n = points.shape[0]
    if not 1 <= k < n:
        raise ParameterError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")

    if n <= DENSE_LIMIT:
        d2 = cdist(points, points, "sqeuclidean")
        np.fill_diagonal(d2, np.inf)
        nearest = np.argpartition(d2, k - 1, axis=1)[:, :k]
        selected = np.zeros((n, n), dtype=bool)
        selected[np.arange(n)[:, None], nearest] = True
        selected |= selected.T
        np.fill_diagonal(d2, 0.0)
        W = np.where(selected, np.exp(-d2 / sigma**2), 0.0)
        np.fill_diagonal(W, 0.0)
        return Graph(W)

    # Large inputs: KD-tree queries and sparse storage.
    tree = cKDTree(points)
    dist, idx = tree.query(points, k=k + 1)
    rows, cols, vals = [], [], []
    for u in range(n):
        neigh = [(idx[u, j], dist[u, j]) for j in range(k + 1) if idx[u, j] != u][:k]
        for v, d in neigh:
            rows.append(u)
            cols.append(v)
            vals.append(np.exp(-(d * d) / sigma**2))
    W = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    W = W.maximum(W.T)  # union symmetrization; weights agree on both sides
    W.setdiag(0.0)
    W.eliminate_zeros()
    return Graph(W)


def degree_vector(g: Graph) -> np.ndarray:
    """Row sums of the adjacency."""
    W = g.weights
    if sp.issparse(W):
        return np.asarray(W.sum(axis=1)).ravel()
    return W.sum(axis=1)


def volume(g: Graph, s: NodeSet) -> float:
    """Sum of degrees over ``s``."""
    s.validate_within(g.n)
    if not len(s):
        return 0.0
    return float(degree_vector(g)[s.sorted()].sum())


def random_walk_matrix(g: Graph) -> Adjacency:
    """Row-stochastic transition matrix D^{-1} W.

    Raises DegenerateError when some node is isolated (zero degree).
    """
    d = degree_vector(g)
    if (d <= 0).any():
        bad = int(np.flatnonzero(d <= 0)[0])
        raise DegenerateError(f"node {bad} has zero degree; random walk undefined")
    if sp.issparse(g.weights):
        return sp.diags(1.0 / d) @ g.weights
    return g.weights / d[:, None]


def geodesic_hops(g: Graph, sources: NodeSet) -> np.ndarray:
    """Unweighted shortest-path hop counts from each source to every node.

    Returns a (len(sources), n) float array ordered by ascending source
    id; unreachable pairs are ``inf``. Callers that need finite
    distances must check for the marker themselves.
    """
    sources.validate_within(g.n)
    if not len(sources):
        raise ParameterError("sources must be nonempty")
    pattern = g.weights != 0
    if not sp.issparse(pattern):
        pattern = sp.csr_matrix(pattern)
    return shortest_path(pattern, method="D", unweighted=True, indices=sources.sorted())


def is_connected(g: Graph) -> bool:
    pattern = g.weights != 0
    if not sp.issparse(pattern):
        pattern = sp.csr_matrix(pattern)
    ncomp, _ = connected_components(pattern, directed=False)
    return ncomp == 1
