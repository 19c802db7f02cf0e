"""CSV and JSON file formats.

All artifacts are plain text so they stay human-diffable:

* edge list      -- header ``u,v,w``; one row per undirected edge, 0-based ids
* features       -- no header; one row of floats per point
* labels         -- header ``node,class``; 0-based contiguous class ids
* score vectors  -- header ``node,score`` (or per-class columns)
* sweep output   -- header ``rank,node,q,prefix_cheeger`` plus a trailing
                    ``# tau=...,best_index=...`` summary line
* curves         -- header ``gamma,cheeger``
"""
from __future__ import annotations

import csv
import json
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DataError
from .graph import DENSE_LIMIT, Graph, NodeSet


def _fmt(x) -> str:
    return repr(float(x))


def load_edge_csv(path, n: int | None = None) -> Graph:
    """Read an edge-list CSV into a Graph.

    Node count is ``max id + 1`` unless ``n`` is given. Each undirected
    edge must be listed once; duplicates and self-loops are rejected.
    """
    rows = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:3]] != ["u", "v", "w"]:
                raise DataError(f"{path}: expected header 'u,v,w'")
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                try:
                    u, v, w = int(row[0]), int(row[1]), float(row[2])
                except (ValueError, IndexError) as exc:
                    raise DataError(f"{path}:{lineno}: bad edge row {row!r}") from exc
                if u < 0 or v < 0:
                    raise DataError(f"{path}:{lineno}: negative node id")
                if u == v:
                    raise DataError(f"{path}:{lineno}: self-loop on node {u}")
                if w < 0 or not np.isfinite(w):
                    raise DataError(f"{path}:{lineno}: invalid weight {w}")
                rows.append((u, v, w))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    max_id = max((max(u, v) for u, v, _ in rows), default=-1)
    if n is None:
        n = max_id + 1
    elif max_id >= n:
        raise DataError(f"{path}: node id {max_id} exceeds declared n={n}")
    if n < 1:
        raise DataError(f"{path}: no nodes")

    seen = set()
    for u, v, _ in rows:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DataError(f"{path}: duplicate edge {key}")
        seen.add(key)

    if n <= DENSE_LIMIT:
        W = np.zeros((n, n))
        for u, v, w in rows:
            W[u, v] = w
            W[v, u] = w
        return Graph(W)
    us = [u for u, v, _ in rows] + [v for u, v, _ in rows]
    vs = [v for u, v, _ in rows] + [u for u, v, _ in rows]
    ws = [w for _, _, w in rows] * 2
    return Graph(sp.coo_matrix((ws, (us, vs)), shape=(n, n)).tocsr())


def save_edge_csv(g: Graph, path) -> None:
    W = g.weights
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["u", "v", "w"])
        if sp.issparse(W):
            coo = sp.triu(W, k=1).tocoo()
            for u, v, w in zip(coo.row, coo.col, coo.data):
                out.writerow([int(u), int(v), _fmt(w)])
        else:
            us, vs = np.nonzero(np.triu(W, k=1))
            for u, v in zip(us, vs):
                out.writerow([int(u), int(v), _fmt(W[u, v])])


def load_features_csv(path) -> np.ndarray:
    """Read a headerless float CSV into an (n, d) feature matrix."""
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                try:
                    rows.append([float(c) for c in row])
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: non-numeric entry") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty feature file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataError(f"{path}: rows have inconsistent dimension")
    points = np.asarray(rows, dtype=float)
    if not np.isfinite(points).all():
        raise DataError(f"{path}: feature matrix contains NaN or inf")
    return points


def save_features_csv(points: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        for row in np.asarray(points, dtype=float):
            out.writerow([_fmt(x) for x in row])


def load_labels_csv(path) -> list[NodeSet]:
    """Read a ``node,class`` CSV into per-class node sets.

    Class ids must be 0-based and contiguous; the result is indexed by
    class id.
    """
    pairs = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header[:2]] != ["node", "class"]:
                raise DataError(f"{path}: expected header 'node,class'")
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                try:
                    pairs.append((int(row[0]), int(row[1])))
                except (ValueError, IndexError) as exc:
                    raise DataError(f"{path}:{lineno}: bad label row {row!r}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not pairs:
        raise DataError(f"{path}: no labels")
    classes = sorted({c for _, c in pairs})
    if classes[0] != 0 or classes[-1] != len(classes) - 1:
        raise DataError(f"{path}: class ids must be contiguous from 0, got {classes}")
    seen = {}
    for u, c in pairs:
        if u in seen and seen[u] != c:
            raise DataError(f"{path}: node {u} labeled with two classes")
        seen[u] = c
    return [NodeSet.of(u for u, c in pairs if c == k) for k in range(len(classes))]


def save_labels_csv(classes: Sequence[NodeSet], path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["node", "class"])
        for k, s in enumerate(classes):
            for u in sorted(s.members):
                out.writerow([u, k])


def save_scores_csv(values: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["node", "score"])
        for u, x in enumerate(values):
            out.writerow([u, _fmt(x)])


def save_multiclass_csv(scores: np.ndarray, assignments: np.ndarray, path) -> None:
    n, k = scores.shape
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["node"] + [f"score_{c}" for c in range(k)] + ["assigned"])
        for u in range(n):
            out.writerow([u] + [_fmt(x) for x in scores[u]] + [int(assignments[u])])


def save_sweep_csv(result, path) -> None:
    """Write a SweepCutResult; prefix_cheeger is empty on the last rank."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["rank", "node", "q", "prefix_cheeger"])
        n = len(result.permutation)
        for i in range(n):
            ratio = _fmt(result.prefix_ratios[i]) if i < n - 1 else ""
            out.writerow([i + 1, int(result.permutation[i]), _fmt(result.q_values[i]), ratio])
        fh.write(f"# tau={_fmt(result.tau)},best_index={result.best_index}\n")


def save_curve_csv(gammas: np.ndarray, values: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["gamma", "cheeger"])
        for g, h in zip(gammas, values):
            out.writerow([_fmt(g), _fmt(h)])


def save_matrix_csv(matrix: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        for row in matrix:
            out.writerow([_fmt(x) for x in row])


def save_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
