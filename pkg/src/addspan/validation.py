"""Input coercion for the estimator layer."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .graph import DemandSet, GraphError, WeightedGraph


def check_graph(X) -> WeightedGraph:
    """Accept a WeightedGraph, an ``(m, 3)`` edge array, or a symmetric adjacency matrix.

    Dense matrices treat 0 as "no edge"; use a sparse matrix with explicit
    zeros (or an edge array) for zero-weight edges.
    """
    if isinstance(X, WeightedGraph):
        return X
    if sp.issparse(X):
        A = sp.triu(sp.coo_matrix(X), k=1)
        if X.shape[0] != X.shape[1]:
            raise GraphError(f"adjacency matrix must be square, got {X.shape}")
        order = np.lexsort((A.col, A.row))
        return WeightedGraph(X.shape[0], np.column_stack([A.row[order], A.col[order], A.data[order]]))
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise GraphError(f"cannot interpret input of shape {arr.shape} as a graph")
    square = arr.shape[0] == arr.shape[1]
    # a 3x3 input is an adjacency matrix only if it is symmetric with zero diagonal
    if square and np.array_equal(arr, arr.T) and not np.any(np.diag(arr)):
        u, v = np.nonzero(np.triu(arr, k=1))
        return WeightedGraph(arr.shape[0], np.column_stack([u, v, arr[u, v]]))
    if arr.shape[1] == 3:
        return _from_edges(arr)
    if square:
        raise GraphError("adjacency matrix must be symmetric with a zero diagonal")
    raise GraphError(f"cannot interpret input of shape {arr.shape} as a graph")


def _from_edges(arr: np.ndarray) -> WeightedGraph:
    if len(arr) == 0:
        raise GraphError("edge array is empty; pass a WeightedGraph to fix n")
    if np.any(arr[:, :2] != np.round(arr[:, :2])):
        raise GraphError("vertex ids must be integers")
    n = int(arr[:, :2].max()) + 1
    return WeightedGraph(n, arr)


def check_pairs(P, n: int) -> DemandSet | None:
    if P is None or isinstance(P, DemandSet):
        if P is not None and P.n != n:
            raise GraphError(f"demand set is over {P.n} vertices, graph has {n}")
        return P
    return DemandSet(np.asarray(P, dtype=np.int64).reshape(-1, 2), n)


def check_eps(eps) -> float:
    eps = float(eps)
    if not eps > 0 or not np.isfinite(eps):
        raise ValueError(f"eps must be a positive finite number, got {eps}")
    return eps
