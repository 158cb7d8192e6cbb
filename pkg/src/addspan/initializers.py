"""Distance-oblivious seeding: d-light and d-lightweight initialisation, plus MST subdivision."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import EdgeSubset, GraphError, WeightedGraph, minimum_spanning_tree


def d_light_init(G: WeightedGraph, d: int) -> EdgeSubset:
    """Union over vertices of their ``d`` lightest incident edges (ties by edge id)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    deg = np.diff(G.indptr)
    rank = np.arange(len(G.adj_e)) - np.repeat(G.indptr[:-1], deg)
    mask = np.zeros(G.m, dtype=bool)
    mask[G.adj_e[rank < d]] = True
    return EdgeSubset(G, mask)


@dataclass(frozen=True)
class Preprocessed:
    """Scaled copy of a graph with heavy edges dropped.

    ``orig_ids[i]`` is the id in the source graph of edge ``i`` of ``graph``.
    """

    graph: WeightedGraph
    scale: float
    orig_ids: np.ndarray

    def to_original(self, H: EdgeSubset, source: WeightedGraph) -> EdgeSubset:
        return EdgeSubset(source, self.orig_ids[H.ids()])


def preprocess_light(G: WeightedGraph) -> Preprocessed:
    """Scale weights so the MST weighs ``n/2``, then drop edges of scaled weight ``>= n``."""
    mst_w = minimum_spanning_tree(G).weight
    if not mst_w > 0:
        raise GraphError("degenerate metric; lightness undefined (MST weight is 0)")
    scale = (G.n / 2) / mst_w
    w = G.w * scale
    keep = np.flatnonzero(w < G.n)
    scaled = WeightedGraph(G.n, np.column_stack([G.eu[keep], G.ev[keep], w[keep]]))
    return Preprocessed(scaled, float(scale), keep)


def d_lightweight_init(G: WeightedGraph, d: float) -> EdgeSubset:
    """MST plus, per vertex in id order, its lightest non-member edges within a weight budget ``d``.

    A vertex stops at the first edge that would push its running total past ``d``.
    """
    if d < 0:
        raise ValueError("d must be >= 0")
    mask = minimum_spanning_tree(G).mask.copy()
    if d == 0:
        return EdgeSubset(G, mask)
    w = G.w
    for v in range(G.n):
        spent = 0.0
        for e in G.incident(v).tolist():
            if mask[e]:
                continue
            if spent + w[e] > d:
                break
            mask[e] = True
            spent += w[e]
    return EdgeSubset(G, mask)


@dataclass(frozen=True)
class SubdividedGraph:
    """``graph`` splits every MST edge ``e`` of ``base`` into ``ceil(w(e))`` equal segments.

    Vertices ``0..n-1`` are the original ones. For a subdivision vertex
    ``vertex_edge`` holds the MST edge it sits on and ``vertex_seg`` its
    position (1-based from the edge's ``u`` end); both are -1 for original
    vertices. ``edge_origin[e']`` is the base edge that ``e'`` came from and
    ``edge_segment`` is -1 for edges that were not subdivided.
    """

    base: WeightedGraph
    graph: WeightedGraph
    mst: EdgeSubset
    vertex_edge: np.ndarray
    vertex_seg: np.ndarray
    edge_origin: np.ndarray
    edge_segment: np.ndarray

    @property
    def is_mst_edge(self) -> np.ndarray:
        return self.mst.mask[self.edge_origin]

    def lift(self, H: EdgeSubset) -> EdgeSubset:
        """Image of a base-graph edge set: member edges keep all their segments."""
        return EdgeSubset(self.graph, H.mask[self.edge_origin])

    def mst_subset(self) -> EdgeSubset:
        return EdgeSubset(self.graph, self.is_mst_edge)

    def embed_path(self, edge_ids) -> list[int]:
        """Map a base-graph path (edge ids in order, starting anywhere) to its segment edges.

        Segments of an edge are listed from its ``u`` end; callers needing
        direction should use :meth:`path_vertices`-style walks instead.
        """
        out = []
        for e in edge_ids:
            out.extend(self._segments[e])
        return out

    @property
    def _segments(self) -> dict[int, list[int]]:
        cache = self.__dict__.get("_seg_cache")
        if cache is None:
            cache = {}
            for i, e in enumerate(self.edge_origin.tolist()):
                cache.setdefault(e, []).append(i)
            object.__setattr__(self, "_seg_cache", cache)
        return cache


def segment_count(w: float) -> int:
    return max(1, math.ceil(w))


def subdivide_mst(G: WeightedGraph, mst: EdgeSubset | None = None) -> SubdividedGraph:
    """Replace each MST edge of weight ``w`` by a chain of ``ceil(w)`` edges of weight ``w / ceil(w)``."""
    if mst is None:
        mst = minimum_spanning_tree(G)
    rows, origin, seg = [], [], []
    v_edge, v_seg = [-1] * G.n, [-1] * G.n
    nxt = G.n
    for e in range(G.m):
        u, v, w = G.edge(e)
        k = segment_count(w) if mst.mask[e] else 1
        if k == 1:
            rows.append((u, v, w))
            origin.append(e)
            seg.append(-1)
            continue
        chain = [u] + list(range(nxt, nxt + k - 1)) + [v]
        for i in range(1, k):
            v_edge.append(e)
            v_seg.append(i)
        nxt += k - 1
        piece = w / k
        for i in range(k):
            rows.append((chain[i], chain[i + 1], piece))
            origin.append(e)
            seg.append(i)
    sub = WeightedGraph(nxt, rows if rows else np.zeros((0, 3)))
    return SubdividedGraph(G, sub, mst, np.array(v_edge), np.array(v_seg),
                           np.array(origin, dtype=np.int64), np.array(seg, dtype=np.int64))
