"""Canonical all-pairs shortest paths with consistent tie-breaking.

Every edge carries a random integer token. Paths are compared by
``(length, token sum, hop count)``; length comparisons use a relative
tolerance of ``TIE_TOL`` so float rounding noise counts as a tie. With
distinct random tokens the minimiser is unique, and a unique minimiser of an
additive key has the subpath property.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import WeightedGraph

TIE_TOL = 1e-12
TOKEN_MAX = 2 ** 32
MAX_REDRAWS = 8


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class ErrorSpec:
    """Additive error family: ``(c + eps) * W(s,t)`` locally or ``(c + eps) * W_max`` globally."""

    c: float
    eps: float = 0.0
    local: bool = True

    def __post_init__(self):
        if self.c < 0 or self.eps < 0:
            raise ValueError("error spec needs c >= 0 and eps >= 0")

    @classmethod
    def global_(cls, c: float, eps: float = 0.0) -> "ErrorSpec":
        return cls(c, eps, local=False)

    @property
    def factor(self) -> float:
        return self.c + self.eps

    def __str__(self) -> str:
        kind = "W(s,t)" if self.local else "W"
        return f"+{self.factor:g}{kind}"


@dataclass(frozen=True)
class TieBreakKey:
    """Path key; ``<`` is the ordering the oracle minimises."""

    base: float
    perturb: int
    hops: int

    def __add__(self, other: "TieBreakKey") -> "TieBreakKey":
        return TieBreakKey(self.base + other.base, self.perturb + other.perturb, self.hops + other.hops)

    def __lt__(self, other: "TieBreakKey") -> bool:
        tol = TIE_TOL * max(1.0, abs(self.base), abs(other.base))
        if abs(self.base - other.base) > tol:
            return self.base < other.base
        return (self.perturb, self.hops) < (other.perturb, other.hops)


def draw_tokens(m: int, seed: int) -> np.ndarray:
    """``m`` distinct integers in ``[1, 2**32]``."""
    rng = np.random.default_rng(seed)
    tok = rng.integers(1, TOKEN_MAX + 1, size=m, dtype=np.int64)
    while len(np.unique(tok)) < m:
        _, first = np.unique(tok, return_index=True)
        dup = np.setdiff1d(np.arange(m), first)
        tok[dup] = rng.integers(1, TOKEN_MAX + 1, size=len(dup), dtype=np.int64)
    return tok


class PathOracle:
    """Canonical shortest paths ``pi(s,t)`` with ``d_G(s,t)`` and ``W(s,t)`` for all pairs.

    ``dist[s, t]`` is accumulated along the tree rooted at ``s``, so it equals
    the summed length of ``path(s, t)`` bit for bit.
    """

    def __init__(self, graph: WeightedGraph, tokens: np.ndarray, dist: np.ndarray,
                 pred: np.ndarray, maxw: np.ndarray, seed: int, ties: int = 0):
        self.graph = graph
        self.tokens = tokens
        self.dist = dist
        self.pred = pred
        self.maxw = maxw
        self.seed = seed
        self.ties = ties
        for arr in (tokens, dist, pred, maxw):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.graph.n

    def distance(self, s: int, t: int) -> float:
        return float(self.dist[s, t])

    def max_weight(self, s: int, t: int) -> float:
        return float(self.maxw[s, t])

    def path(self, s: int, t: int) -> list[int]:
        """Edge ids of ``pi(s, t)`` ordered from ``s`` to ``t``."""
        G, pred = self.graph, self.pred[s]
        out = []
        x = t
        while x != s:
            e = int(pred[x])
            if e < 0:
                raise OracleError(f"{t} unreachable from {s}")
            out.append(e)
            x = G.other(e, x)
        out.reverse()
        return out

    def path_vertices(self, s: int, t: int) -> list[int]:
        G, pred = self.graph, self.pred[s]
        out = [t]
        x = t
        while x != s:
            x = G.other(int(pred[x]), x)
            out.append(x)
        out.reverse()
        return out

    def key(self, s: int, t: int) -> TieBreakKey:
        p = self.path(s, t)
        return TieBreakKey(self.distance(s, t), int(self.tokens[p].sum()), len(p))

    def tree(self, root: int) -> np.ndarray:
        """Edge ids of the canonical shortest-path tree rooted at ``root``."""
        p = self.pred[root]
        return np.unique(p[p >= 0])

    def check_subpaths(self, samples: int, rng: np.random.Generator) -> int:
        """Compare ``pi(u, v)`` with the slice of ``pi(s, t)`` on random triples; returns violations."""
        n = self.n
        if n < 2:
            return 0
        bad = 0
        for _ in range(samples):
            s, t = rng.choice(n, size=2, replace=False)
            verts = self.path_vertices(int(s), int(t))
            edges = self.path(int(s), int(t))
            i, j = sorted(rng.choice(len(verts), size=2, replace=False))
            if self.path(verts[i], verts[j]) != edges[i:j]:
                bad += 1
        return bad


def build_oracle(G: WeightedGraph, seed: int = 0, tokens: np.ndarray | None = None,
                 check_samples: int = 64) -> PathOracle:
    """All-pairs canonical paths of a connected graph.

    Token draws that leave a residual tie (two distinct paths with equal base
    length and equal token sum) are redrawn from ``seed + 1``, ``seed + 2``...
    up to ``MAX_REDRAWS`` times. Passing ``tokens`` skips the draw.
    """
    G.require_connected()
    fixed = tokens is not None
    for attempt in range(1 if fixed else MAX_REDRAWS + 1):
        tok = np.asarray(tokens, dtype=np.int64) if fixed else draw_tokens(G.m, seed + attempt)
        dist, pred, maxw, ties = _kernels.lex_apsp(G.indptr, G.adj_v, G.adj_e, G.eu, G.ev, G.w, tok, TIE_TOL)
        if ties == 0 or fixed:
            break
    else:
        raise OracleError(f"tie-breaking failed after {MAX_REDRAWS} redraws (seed {seed})")
    oracle = PathOracle(G, tok, dist, pred, maxw, seed + (0 if fixed else attempt), int(ties))
    bad = oracle.check_subpaths(check_samples, np.random.default_rng(seed))
    if bad:
        raise OracleError(f"{bad} subpath-consistency violations (seed {seed})")
    return oracle


def canonical_path(o: PathOracle, s: int, t: int) -> list[int]:
    if not (0 <= s < o.n and 0 <= t < o.n):
        raise IndexError(f"vertex out of range: ({s}, {t})")
    return o.path(s, t)


def pair_bound(o: PathOracle, spec: ErrorSpec, s, t):
    """Additive budget for pair(s) ``(s, t)``; accepts scalars or index arrays."""
    if spec.local:
        W = o.maxw[s, t]
    else:
        W = o.graph.max_weight
    out = spec.factor * W
    return float(out) if np.ndim(out) == 0 else out


ABS_TOL = 1e-9


def tolerance(*magnitudes):
    """Comparison slack: ``ABS_TOL`` scaled by the largest finite compared magnitude (at least 1)."""
    scale = np.ones(np.broadcast(*[np.asarray(m, dtype=float) for m in magnitudes]).shape)
    for m in magnitudes:
        a = np.abs(np.asarray(m, dtype=float))
        scale = np.maximum(scale, np.where(np.isfinite(a), a, 0.0))
    out = ABS_TOL * scale
    return float(out) if out.ndim == 0 else out


def within(lhs, rhs):
    """``lhs <= rhs`` up to :func:`tolerance`; elementwise for arrays."""
    return np.asarray(lhs) <= np.asarray(rhs) + tolerance(lhs, rhs)
