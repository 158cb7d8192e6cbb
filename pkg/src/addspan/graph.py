"""Immutable weighted graphs, edge subsets, demand pairs and their text formats."""
from __future__ import annotations

import heapq
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for structurally invalid graphs or graph files."""


class DisconnectedGraphError(GraphError):
    def __init__(self, a: int, b: int):
        self.components = (a, b)
        super().__init__(f"graph is disconnected: vertices {a} and {b} lie in different components")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class WeightedGraph:
    """Undirected simple graph with non-negative edge weights.

    Edges keep the ids they were given (0..m-1). Per-vertex incidence lists
    are stored in CSR form, sorted by ``(weight, edge id)`` so the lightest
    incident edges of a vertex are a prefix of its slice.
    """

    def __init__(self, n: int, edges: Iterable[Sequence[float]] | np.ndarray):
        n = int(n)
        if n < 1:
            raise GraphError(f"vertex count must be >= 1, got {n}")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=float)
        if arr.size == 0:
            arr = np.zeros((0, 3))
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise GraphError("edges must be (u, v, w) triples")
        u = arr[:, 0].astype(np.int64)
        v = arr[:, 1].astype(np.int64)
        w = arr[:, 2].astype(np.float64)
        if np.any(u != arr[:, 0]) or np.any(v != arr[:, 1]):
            raise GraphError("vertex ids must be integers")
        _check_edges(n, u, v, w)
        self.n = n
        self.eu = _frozen(u)
        self.ev = _frozen(v)
        self.w = _frozen(w)
        self._build_adjacency()

    def _build_adjacency(self) -> None:
        m = self.m
        ends = np.concatenate([self.eu, self.ev])
        others = np.concatenate([self.ev, self.eu])
        eids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((eids, self.w[eids], ends))
        self.indptr = _frozen(np.concatenate([[0], np.cumsum(np.bincount(ends, minlength=self.n))]).astype(np.int64))
        self.adj_v = _frozen(others[order].astype(np.int64))
        self.adj_e = _frozen(eids[order].astype(np.int64))

    @property
    def m(self) -> int:
        return len(self.w)

    @property
    def max_weight(self) -> float:
        return float(self.w.max()) if self.m else 0.0

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def incident(self, v: int) -> np.ndarray:
        """Edge ids incident to ``v`` in ``(weight, id)`` order."""
        return self.adj_e[self.indptr[v]:self.indptr[v + 1]]

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj_v[self.indptr[v]:self.indptr[v + 1]]

    def edge(self, e: int) -> tuple[int, int, float]:
        return int(self.eu[e]), int(self.ev[e]), float(self.w[e])

    def edges(self) -> list[tuple[int, int, float]]:
        return [self.edge(e) for e in range(self.m)]

    def other(self, e: int, x: int) -> int:
        return int(self.ev[e]) if self.eu[e] == x else int(self.eu[e])

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(min(a, b), max(a, b)): i for i, (a, b) in enumerate(zip(self.eu.tolist(), self.ev.tolist()))}

    def subgraph(self, edge_ids: Iterable[int]) -> "WeightedGraph":
        """New graph on the same vertices keeping only ``edge_ids`` (re-indexed in given order)."""
        ids = np.asarray(list(edge_ids), dtype=np.int64)
        return WeightedGraph(self.n, np.column_stack([self.eu[ids], self.ev[ids], self.w[ids]]))

    def with_weights(self, w: np.ndarray) -> "WeightedGraph":
        return WeightedGraph(self.n, np.column_stack([self.eu, self.ev, np.asarray(w, dtype=float)]))

    def components(self) -> np.ndarray:
        """Component label (smallest vertex id in the component) for every vertex."""
        uf = _UnionFind(self.n)
        for a, b in zip(self.eu.tolist(), self.ev.tolist()):
            uf.union(a, b)
        first: dict[int, int] = {}
        return np.array([first.setdefault(uf.find(x), x) for x in range(self.n)])

    def is_connected(self) -> bool:
        return self.n == 1 or bool(np.all(self.components() == 0))

    def require_connected(self) -> None:
        comp = self.components()
        bad = np.flatnonzero(comp != 0)
        if len(bad):
            raise DisconnectedGraphError(0, int(comp[bad[0]]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.eu, other.eu)
                and np.array_equal(self.ev, other.ev) and np.array_equal(self.w, other.w))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"


def _check_edges(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray, lines: Sequence[int] | None = None) -> None:
    def where(i: int) -> str:
        return f" at line {lines[i]}" if lines is not None else f" (edge {i})"

    for i in range(len(w)):
        if not (0 <= u[i] < n and 0 <= v[i] < n):
            raise GraphError(f"vertex out of range{where(i)}")
        if u[i] == v[i]:
            raise GraphError(f"self-loop{where(i)}")
        if not math.isfinite(w[i]):
            raise GraphError(f"non-finite weight{where(i)}")
        if w[i] < 0:
            raise GraphError(f"negative weight{where(i)}")
    seen: dict[tuple[int, int], int] = {}
    for i, (a, b) in enumerate(zip(u.tolist(), v.tolist())):
        key = (min(a, b), max(a, b))
        if key in seen:
            raise GraphError(f"duplicate edge {key}{where(i)}")
        seen[key] = i


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


class EdgeSubset:
    """Read-only set of edge ids of a host graph, with cached total weight."""

    def __init__(self, host: WeightedGraph, member: np.ndarray | Iterable[int]):
        self.host = host
        if isinstance(member, np.ndarray) and member.dtype == bool:
            mask = member.copy()
            if mask.shape != (host.m,):
                raise GraphError("membership mask has wrong length")
        else:
            ids = np.fromiter((int(x) for x in member), dtype=np.int64)
            if len(ids) and (ids.min() < 0 or ids.max() >= host.m):
                raise GraphError("edge id out of range")
            mask = np.zeros(host.m, dtype=bool)
            mask[ids] = True
        self.mask = _frozen(mask)
        self.weight = float(host.w[mask].sum())

    @classmethod
    def empty(cls, host: WeightedGraph) -> "EdgeSubset":
        return cls(host, np.zeros(host.m, dtype=bool))

    @classmethod
    def full(cls, host: WeightedGraph) -> "EdgeSubset":
        return cls(host, np.ones(host.m, dtype=bool))

    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __contains__(self, e: int) -> bool:
        return bool(self.mask[e])

    def __iter__(self):
        return iter(self.ids().tolist())

    def __or__(self, other: "EdgeSubset") -> "EdgeSubset":
        if other.host is not self.host:
            raise GraphError("edge subsets live on different hosts")
        return EdgeSubset(self.host, self.mask | other.mask)

    def __le__(self, other: "EdgeSubset") -> bool:
        return bool(np.all(~self.mask | other.mask))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeSubset):
            return NotImplemented
        return self.host is other.host and np.array_equal(self.mask, other.mask)

    __hash__ = None  # type: ignore[assignment]

    def as_graph(self) -> WeightedGraph:
        return self.host.subgraph(self.ids())

    def __repr__(self) -> str:
        return f"EdgeSubset({len(self)}/{self.host.m} edges, weight={self.weight:.6g})"


class DemandSet:
    """Sorted, deduplicated unordered vertex pairs, stored as ``s < t`` rows."""

    def __init__(self, pairs: Iterable[Sequence[int]] | np.ndarray, n: int):
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 2), dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise GraphError("pairs must be (s, t) rows")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise GraphError("pair with s == t")
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise GraphError("pair vertex out of range")
        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0)
        self.n = int(n)
        self.pairs = _frozen(arr)

    @classmethod
    def all_pairs(cls, n: int) -> "DemandSet":
        s, t = np.triu_indices(n, k=1)
        return cls(np.column_stack([s, t]), n)

    @classmethod
    def random(cls, n: int, k: int, rng: np.random.Generator) -> "DemandSet":
        """``k`` distinct pairs drawn uniformly without replacement (capped at n choose 2)."""
        total = n * (n - 1) // 2
        k = min(int(k), total)
        codes = np.sort(rng.choice(total, size=k, replace=False))
        s, t = np.triu_indices(n, k=1)
        return cls(np.column_stack([s[codes], t[codes]]), n)

    @property
    def s(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def t(self) -> np.ndarray:
        return self.pairs[:, 1]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(map(tuple, self.pairs.tolist()))

    def subset(self, keep: np.ndarray) -> "DemandSet":
        return DemandSet(self.pairs[keep], self.n)

    def __repr__(self) -> str:
        return f"DemandSet({len(self)} pairs, n={self.n})"


# ---------------------------------------------------------------- spanning trees

def minimum_spanning_tree(G: WeightedGraph, method: str = "kruskal") -> EdgeSubset:
    """Minimum spanning tree; ties go to the lowest edge id.

    ``method`` is ``"kruskal"`` (edge sorting) or ``"prim"`` (tree growing from
    vertex 0). Both give the same tree because ``(weight, id)`` is a strict
    total order on edges.
    """
    if method == "kruskal":
        order = np.lexsort((np.arange(G.m), G.w))
        uf = _UnionFind(G.n)
        chosen = [e for e in order.tolist() if uf.union(int(G.eu[e]), int(G.ev[e]))]
    elif method == "prim":
        chosen = _prim(G)
    else:
        raise ValueError(f"unknown MST method {method!r}")
    if len(chosen) != G.n - 1:
        G.require_connected()
    return EdgeSubset(G, chosen)


def _prim(G: WeightedGraph) -> list[int]:
    in_tree = np.zeros(G.n, dtype=bool)
    heap: list[tuple[float, int, int]] = []
    chosen = []

    def grow(x: int) -> None:
        in_tree[x] = True
        for e, y in zip(G.incident(x).tolist(), G.neighbors(x).tolist()):
            if not in_tree[y]:
                heapq.heappush(heap, (float(G.w[e]), e, y))

    grow(0)
    while heap:
        _, e, y = heapq.heappop(heap)
        if in_tree[y]:
            continue
        chosen.append(e)
        grow(y)
    return chosen


def mst_weight(G: WeightedGraph) -> float:
    return minimum_spanning_tree(G).weight


def lightness(H: EdgeSubset) -> float:
    """Total weight of ``H`` over the MST weight of its host."""
    return H.weight / mst_weight(H.host)


# ---------------------------------------------------------------- text formats

def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line.split()


def load_graph(source) -> WeightedGraph:
    """Parse the ``n m`` / ``u v w`` edge-list format from text, bytes or a stream."""
    lines = _content_lines(_read_text(source))
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise GraphError("empty graph file: missing 'n m' header") from None
    if len(head) != 2:
        raise GraphError(f"malformed header at line {lineno}: expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphError(f"malformed header at line {lineno}: expected 'n m'") from None
    if n < 1 or m < 0:
        raise GraphError(f"malformed header at line {lineno}: need n >= 1 and m >= 0")
    rows, where = [], []
    for lineno, parts in lines:
        if len(parts) != 3:
            raise GraphError(f"malformed edge at line {lineno}: expected 'u v w'")
        try:
            rows.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise GraphError(f"malformed edge at line {lineno}") from None
        where.append(lineno)
    if len(rows) != m:
        raise GraphError(f"header declares {m} edges but {len(rows)} were found")
    u = np.array([r[0] for r in rows], dtype=np.int64)
    v = np.array([r[1] for r in rows], dtype=np.int64)
    w = np.array([r[2] for r in rows], dtype=np.float64)
    _check_edges(n, u, v, w, where)
    return WeightedGraph(n, np.column_stack([u, v, w]) if m else np.zeros((0, 3)))


def save_graph(G: WeightedGraph, dest=None, comments: Sequence[str] = ()) -> str | None:
    """Write ``G`` in edge-list format. Weights use ``repr`` so they round-trip exactly."""
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(f"{G.n} {G.m}\n")
    for a, b, w in zip(G.eu.tolist(), G.ev.tolist(), G.w.tolist()):
        buf.write(f"{a} {b} {w!r}\n")
    return _emit(buf.getvalue(), dest)


def load_pairs(source, n: int) -> DemandSet:
    rows = []
    for lineno, parts in _content_lines(_read_text(source)):
        if len(parts) != 2:
            raise GraphError(f"malformed pair at line {lineno}: expected 's t'")
        try:
            s, t = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"malformed pair at line {lineno}") from None
        if not (0 <= s < n and 0 <= t < n):
            raise GraphError(f"vertex out of range at line {lineno}")
        if s == t:
            raise GraphError(f"pair with s == t at line {lineno}")
        rows.append((s, t))
    return DemandSet(rows, n)


def save_pairs(P: DemandSet, dest=None) -> str | None:
    text = "".join(f"{s} {t}\n" for s, t in P.pairs.tolist())
    return _emit(text, dest)


def _emit(text: str, dest) -> str | None:
    if dest is None:
        return text
    if isinstance(dest, str):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dest.write(text)
    return None
