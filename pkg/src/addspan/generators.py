"""Seeded random and structured graph generators."""
from __future__ import annotations

from typing import Mapping

import numpy as np

from .graph import DemandSet, GraphError, WeightedGraph

MAX_CONNECT_ATTEMPTS = 100


def parse_weight_dist(spec) -> tuple:
    """Normalise ``"unit"``, ``"uniform:a:b"``, ``"exponential:lam"`` or tuples."""
    if isinstance(spec, str):
        parts = spec.split(":")
        spec = (parts[0],) + tuple(float(p) for p in parts[1:])
    kind = spec[0]
    if kind == "unit" and len(spec) == 1:
        return ("unit",)
    if kind == "uniform" and len(spec) == 3:
        a, b = float(spec[1]), float(spec[2])
        if not (0 <= a <= b):
            raise GraphError(f"uniform weights need 0 <= a <= b, got ({a}, {b})")
        return ("uniform", a, b)
    if kind == "exponential" and len(spec) == 2:
        lam = float(spec[1])
        if lam <= 0:
            raise GraphError("exponential rate must be positive")
        return ("exponential", lam)
    raise GraphError(f"unknown weight distribution {spec!r}")


def _weights(dist: tuple, k: int, rng: np.random.Generator) -> np.ndarray:
    if dist[0] == "unit":
        return np.ones(k)
    if dist[0] == "uniform":
        return rng.uniform(dist[1], dist[2], size=k)
    return rng.exponential(1.0 / dist[1], size=k)


def _pack(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> WeightedGraph:
    return WeightedGraph(n, np.column_stack([u, v, w]) if len(u) else np.zeros((0, 3)))


def generate(model: str, params: Mapping[str, float], weight_dist="unit", seed: int = 0) -> WeightedGraph:
    """Build a graph from ``model`` in {gnp, grid, complete}.

    ``gnp`` takes ``n`` and ``p`` and redraws until connected;
    ``grid`` takes ``rows`` and ``cols``; ``complete`` takes ``n``.
    The result depends only on the arguments.
    """
    dist = parse_weight_dist(weight_dist)
    rng = np.random.default_rng(seed)
    if model == "complete":
        n = int(params["n"])
        if n < 1:
            raise GraphError("complete graph needs n >= 1")
        u, v = np.triu_indices(n, k=1)
        return _pack(n, u, v, _weights(dist, len(u), rng))
    if model == "grid":
        rows, cols = int(params["rows"]), int(params["cols"])
        if rows < 1 or cols < 1:
            raise GraphError("grid needs rows, cols >= 1")
        ids = np.arange(rows * cols).reshape(rows, cols)
        u = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
        v = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        return _pack(rows * cols, u, v, _weights(dist, len(u), rng))
    if model == "gnp":
        n, p = int(params["n"]), float(params["p"])
        if n < 1 or not (0 < p <= 1):
            raise GraphError(f"gnp needs n >= 1 and 0 < p <= 1, got n={n}, p={p}")
        iu, iv = np.triu_indices(n, k=1)
        for _ in range(MAX_CONNECT_ATTEMPTS):
            keep = rng.random(len(iu)) < p
            G = _pack(n, iu[keep], iv[keep], _weights(dist, int(keep.sum()), rng))
            if G.is_connected():
                return G
        raise GraphError(f"gnp(n={n}, p={p}) stayed disconnected after {MAX_CONNECT_ATTEMPTS} attempts")
    raise GraphError(f"unknown graph model {model!r}")


def random_pairs(n: int, k: int, seed: int = 0) -> DemandSet:
    return DemandSet.random(n, k, np.random.default_rng(seed))
