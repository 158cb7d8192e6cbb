"""Growing spanner with exact distance queries, and the generic completion pass."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from . import _kernels
from .graph import DemandSet, EdgeSubset, WeightedGraph
from .paths import ErrorSpec, PathOracle, pair_bound, within

# pending insertions beyond this count trigger a full recomputation instead of
# one O(n^2) relaxation per edge
REBUILD_AT = 128


def member_distances(G: WeightedGraph, mask: np.ndarray, sources=None) -> np.ndarray:
    """Shortest-path lengths inside the member edges (inf when unreachable)."""
    ids = np.flatnonzero(mask)
    A = sp.csr_matrix((G.w[ids], (G.eu[ids], G.ev[ids])), shape=(G.n, G.n))
    return dijkstra(A, directed=False, indices=sources)


@dataclass(frozen=True)
class InsertionRecord:
    """One insertion event; ``t == -1`` marks a tree rooted at ``s``."""

    stage: str
    s: int
    t: int
    W: float
    dG: float
    edges: tuple

    def __len__(self):
        return len(self.edges)


LOG_COLUMNS = ("pair_s", "pair_t", "W_st", "dG_st", "edges_added", "stage")


def write_log(records: Iterable[InsertionRecord], dest=None, comments=()) -> str | None:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(LOG_COLUMNS)
    for r in records:
        wr.writerow([r.s, r.t, repr(r.W), repr(r.dG), len(r.edges), r.stage])
    text = buf.getvalue()
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    return None


class Spanner:
    """Edge subset of ``oracle.graph`` that only grows.

    All-pairs spanner distances are kept in a matrix. Inserted edges are queued
    and folded in lazily: a few by exact single-edge relaxation, many by
    recomputing from scratch.
    """

    def __init__(self, oracle: PathOracle, members=None):
        self.oracle = oracle
        self.graph = oracle.graph
        self._mask = np.zeros(self.graph.m, dtype=bool)
        if members is not None:
            self._mask |= _as_mask(self.graph, members)
        self._D = None
        self._pending: list[int] = []
        self.log: list[InsertionRecord] = []
        self.info: dict = {}

    @classmethod
    def from_members(cls, oracle, members) -> "Spanner":
        return cls(oracle, members)

    # membership
    @property
    def members(self) -> EdgeSubset:
        return EdgeSubset(self.graph, self._mask)

    @property
    def mask(self) -> np.ndarray:
        view = self._mask.view()
        view.setflags(write=False)
        return view

    def __len__(self):
        return int(self._mask.sum())

    @property
    def weight(self) -> float:
        return float(self.graph.w[self._mask].sum())

    def __contains__(self, e) -> bool:
        return bool(self._mask[e])

    def missing(self, edge_ids) -> list[int]:
        return [e for e in edge_ids if not self._mask[e]]

    def add_edges(self, edge_ids) -> np.ndarray:
        """Insert edges; returns the ids that were not members before."""
        ids = np.unique(np.asarray(edge_ids, dtype=np.int64))
        new = ids[~self._mask[ids]]
        if len(new):
            self._mask[new] = True
            if self._D is not None:
                self._pending.extend(new.tolist())
        return new

    def add_path(self, s: int, t: int, stage: str = "complete", edges=None) -> np.ndarray:
        """Insert ``pi(s, t)`` (or the given edges attributed to the pair) and log it."""
        if edges is None:
            edges = self.oracle.path(s, t)
        new = self.add_edges(edges)
        o = self.oracle
        self.log.append(InsertionRecord(stage, int(s), int(t), float(o.maxw[s, t]),
                                        float(o.dist[s, t]), tuple(new.tolist())))
        return new

    def add_tree(self, root: int, stage: str = "tree") -> np.ndarray:
        new = self.add_edges(self.oracle.tree(root))
        self.log.append(InsertionRecord(stage, int(root), -1, 0.0, 0.0, tuple(new.tolist())))
        return new

    # distances
    def _sync(self):
        if self._D is None or len(self._pending) > REBUILD_AT:
            self._D = member_distances(self.graph, self._mask)
        else:
            G = self.graph
            for e in self._pending:
                _kernels.relax_edge(self._D, G.eu[e], G.ev[e], G.w[e])
        self._pending = []

    def matrix(self) -> np.ndarray:
        self._sync()
        return self._D

    def distance(self, s, t):
        """``d_H(s, t)``; accepts index arrays."""
        out = self.matrix()[s, t]
        return float(out) if np.ndim(out) == 0 else out

    def satisfied(self, s, t, spec: ErrorSpec):
        o = self.oracle
        return within(self.distance(s, t), o.dist[s, t] + pair_bound(o, spec, s, t))

    def unsatisfied(self, P: DemandSet, spec: ErrorSpec) -> np.ndarray:
        """Boolean mask over ``P.pairs``."""
        if len(P) == 0:
            return np.zeros(0, dtype=bool)
        return ~np.asarray(self.satisfied(P.s, P.t, spec))


def spanner_distance(H: Spanner, s: int, t: int) -> float:
    return H.distance(s, t)


def _as_mask(G, members) -> np.ndarray:
    if isinstance(members, EdgeSubset):
        return members.mask
    arr = np.asarray(members)
    if arr.dtype == bool:
        return arr
    m = np.zeros(G.m, dtype=bool)
    m[arr.astype(np.int64)] = True
    return m


def completion_order(o: PathOracle, P: DemandSet) -> np.ndarray:
    """Permutation of ``P.pairs`` by ``(W(s,t), d_G(s,t), s, t)``."""
    if len(P) == 0:
        return np.zeros(0, dtype=np.int64)
    s, t = P.s, P.t
    return np.lexsort((t, s, o.dist[s, t], o.maxw[s, t]))


@dataclass
class CompletionResult:
    spanner: Spanner
    records: list = field(default_factory=list)

    @property
    def insertions(self) -> int:
        return len(self.records)


def complete(H: Spanner, P: DemandSet, spec: ErrorSpec, order=None, stage: str = "complete") -> CompletionResult:
    """Insert ``pi(s, t)`` for every pair still unsatisfied when its turn comes.

    Pairs are visited in :func:`completion_order` unless ``order`` is given.
    Pairs satisfied before the pass stay satisfied (distances only shrink), so
    only the initially unsatisfied ones are re-checked.
    """
    if order is None:
        order = completion_order(H.oracle, P)
    order = np.asarray(order, dtype=np.int64)
    bad = H.unsatisfied(P, spec)
    records = []
    pairs = P.pairs
    for i in order[bad[order]].tolist():
        s, t = int(pairs[i, 0]), int(pairs[i, 1])
        if H.satisfied(s, t, spec):
            continue
        H.add_path(s, t, stage)
        records.append(H.log[-1])
    return CompletionResult(H, records)
