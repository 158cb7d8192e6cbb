"""Lightweight spanners with local error, built on a scaled copy of the input."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .completion import InsertionRecord, Spanner, complete
from .graph import DemandSet, EdgeSubset, WeightedGraph, minimum_spanning_tree
from .initializers import SubdividedGraph, d_lightweight_init, preprocess_light
from .paths import ErrorSpec, PathOracle, build_oracle, tolerance

REPORT_COLUMNS = ("n", "m", "eps", "d", "spanner_weight", "mst_weight", "lightness", "completion_insertions")


@dataclass(frozen=True)
class LightnessReport:
    """Weights are on the scaled graph; lightness is scale-free."""

    n: int
    m: int
    eps: float
    d: float
    spanner_weight: float
    mst_weight: float
    lightness: float
    completion_insertions: int

    def row(self) -> list:
        return [getattr(self, c) for c in REPORT_COLUMNS]


def write_reports(reports, dest=None, comments=()) -> str | None:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(REPORT_COLUMNS)
    for r in reports:
        wr.writerow([repr(x) if isinstance(x, float) else x for x in r.row()])
    text = buf.getvalue()
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    return None


def _build_light(G: WeightedGraph, eps: float, d: float, c: float, seed: int,
                 oracle: PathOracle | None) -> tuple[Spanner, LightnessReport]:
    if not eps > 0:
        raise ValueError("eps must be positive")
    pre = preprocess_light(G)
    o = oracle if oracle is not None else build_oracle(G, seed)
    # same tokens on the surviving edges keep the canonical paths identical
    op = build_oracle(pre.graph, tokens=o.tokens[pre.orig_ids])
    Hp = Spanner(op, d_lightweight_init(pre.graph, d))
    res = complete(Hp, DemandSet.all_pairs(G.n), ErrorSpec(c, eps))
    mst_w = minimum_spanning_tree(pre.graph).weight
    H = Spanner(o, pre.orig_ids[Hp.members.ids()])
    # the ratio is scale-free; taking it on the unscaled weights avoids rounding
    report = LightnessReport(G.n, G.m, float(eps), float(d), Hp.weight, mst_w,
                             H.weight / minimum_spanning_tree(G).weight, res.insertions)
    back = pre.orig_ids
    H.log = [InsertionRecord(r.stage, r.s, r.t, r.W / pre.scale, r.dG / pre.scale,
                             tuple(int(back[e]) for e in r.edges)) for r in Hp.log]
    H.info.update(scale=pre.scale, d=d, completion_insertions=res.insertions,
                  preprocessed=Hp, report=report)
    return H, report


def build_eps_light(G: WeightedGraph, eps: float, seed: int = 0,
                    oracle: PathOracle | None = None) -> tuple[Spanner, LightnessReport]:
    """All-pairs spanner with error ``eps W(s,t)`` grown from the MST."""
    return _build_light(G, eps, 0.0, 0.0, seed, oracle)


def build_4eps_light(G: WeightedGraph, eps: float, seed: int = 0, d: float | None = None,
                     oracle: PathOracle | None = None) -> tuple[Spanner, LightnessReport]:
    """All-pairs spanner with error ``(4 + eps) W(s,t)`` grown from a lightweight initialisation."""
    if d is None:
        d = math.ceil(G.n ** (2 / 3) - 1e-9)
    return _build_light(G, eps, d, 4.0, seed, oracle)


# neighbourhood counters on the subdivided graph

def _lifted(SG: SubdividedGraph, H: EdgeSubset) -> EdgeSubset:
    if H.host is SG.graph:
        return H
    return SG.lift(H)


def _ball(G: WeightedGraph, H: EdgeSubset, sources, radius: float) -> np.ndarray:
    ids = H.ids()
    A = sp.csr_matrix((G.w[ids], (G.eu[ids], G.ev[ids])), shape=(G.n, G.n))
    lim = radius + tolerance(radius)
    dist = dijkstra(A, directed=False, indices=list(sources), min_only=True, limit=lim)
    return np.flatnonzero(dist <= lim)


def subdivided_path_vertices(SG: SubdividedGraph, edge_ids) -> set:
    """All ``G'`` vertices on the image of a base-graph path."""
    G1 = SG.graph
    out = set()
    for e in edge_ids:
        u, v, _ = SG.base.edge(e)
        out.update((u, v))
        for f in SG._segments[e]:
            out.update((int(G1.eu[f]), int(G1.ev[f])))
    return out


def lightweight_neighbor_count(SG: SubdividedGraph, H: EdgeSubset, s: int, t: int, eps_prime: float,
                               oracle: PathOracle) -> tuple[int, float]:
    """``(count, z)``: ``G'`` vertices within ``H``-distance ``eps_prime * W(s,t)`` of the path, and the missing weight ``z``.

    ``oracle`` is the base graph's; ``W(s,t)`` is not changed by subdivision.
    """
    if not 0 < eps_prime <= 1:
        raise ValueError("eps_prime must lie in (0, 1]")
    path = oracle.path(s, t)
    base = SG.base
    Hb = H if H.host is not SG.graph else None
    if Hb is not None:
        z = float(sum(base.w[e] for e in path if not Hb.mask[e]))
    else:
        z = float(sum(SG.graph.w[f] for e in path for f in SG._segments[e] if not H.mask[f]))
    Hl = _lifted(SG, H)
    verts = subdivided_path_vertices(SG, path) or {s}
    count = len(_ball(SG.graph, Hl, sorted(verts), eps_prime * oracle.max_weight(s, t)))
    return count, z


def single_edge_neighbor_count(SG: SubdividedGraph, H: EdgeSubset, e: int) -> int:
    """``G'`` vertices within ``H``-distance ``w(e)`` of the ``u`` end of ``G'`` edge ``e``."""
    Hl = _lifted(SG, H)
    if Hl.mask[e]:
        raise ValueError(f"edge {e} is in H")
    G1 = SG.graph
    return len(_ball(G1, Hl, [int(G1.eu[e])], float(G1.w[e])))


def mst_hop_neighborhood(SG: SubdividedGraph, u: int, hops: int) -> set:
    """Vertices of ``G'`` joined to ``u`` by at most ``hops`` MST edges, ``u`` included."""
    G1 = SG.graph
    is_mst = SG.is_mst_edge
    seen = {u}
    frontier = [u]
    for _ in range(max(0, hops)):
        nxt = []
        for x in frontier:
            for e in G1.incident(x).tolist():
                if is_mst[e]:
                    y = G1.other(e, x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
        frontier = nxt
    return seen


def edge_neighborhood(SG: SubdividedGraph, e: int, eps_prime: float, u: int | None = None) -> set:
    """MST-hop neighbourhood of radius ``floor(eps_prime * w(e))`` around endpoint ``u`` of ``G'`` edge ``e``.

    ``u`` defaults to the lower-numbered endpoint.
    """
    G1 = SG.graph
    if u is None:
        u = int(G1.eu[e])
    elif u not in (G1.eu[e], G1.ev[e]):
        raise ValueError(f"{u} is not an endpoint of edge {e}")
    return mst_hop_neighborhood(SG, u, math.floor(eps_prime * float(G1.w[e]) + 1e-12))
