"""Construction-independent audits of spanner outputs."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .graph import DemandSet, EdgeSubset, WeightedGraph, mst_weight
from .paths import ErrorSpec, PathOracle, build_oracle, pair_bound, tolerance


@dataclass(frozen=True)
class Violation:
    s: int
    t: int
    d_G: float
    d_H: float
    bound: float
    slack: float


@dataclass
class VerificationReport:
    pairs_checked: int
    violations: list = field(default_factory=list)
    max_violation: float = 0.0
    edges: int = 0
    weight: float = 0.0
    lightness: float = float("nan")
    spec: str = ""
    lower_bound_failures: int = 0
    slacks: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def ok(self) -> bool:
        return not self.violations and self.lower_bound_failures == 0

    def summary(self) -> str:
        lines = [
            f"spec            {self.spec}",
            f"pairs checked   {self.pairs_checked}",
            f"violations      {len(self.violations)}",
            f"max violation   {self.max_violation:.6g}",
            f"edges           {self.edges}",
            f"weight          {self.weight:.6g}",
            f"lightness       {self.lightness:.6g}",
        ]
        for v in self.violations[:10]:
            lines.append(f"  ({v.s},{v.t}) d_G={v.d_G:.6g} d_H={v.d_H:.6g} bound={v.bound:.6g} slack={v.slack:.3g}")
        if len(self.violations) > 10:
            lines.append(f"  ... {len(self.violations) - 10} more")
        return "\n".join(lines)

    def to_csv(self, dest=None, comments=()) -> str | None:
        buf = io.StringIO()
        for c in comments:
            buf.write(f"# {c}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["kind", "s", "t", "d_G", "d_H", "bound", "slack"])
        for v in self.violations:
            wr.writerow(["violation", v.s, v.t, repr(v.d_G), repr(v.d_H), repr(v.bound), repr(v.slack)])
        wr.writerow(["summary", self.pairs_checked, len(self.violations), self.edges,
                     repr(self.weight), repr(self.lightness), repr(self.max_violation)])
        text = buf.getvalue()
        if dest is None:
            return text
        if hasattr(dest, "write"):
            dest.write(text)
        else:
            with open(dest, "w", encoding="utf-8") as fh:
                fh.write(text)
        return None


def _sssp(G: WeightedGraph, ids: np.ndarray, sources: np.ndarray) -> np.ndarray:
    A = sp.csr_matrix((G.w[ids], (G.eu[ids], G.ev[ids])), shape=(G.n, G.n))
    return np.atleast_2d(dijkstra(A, directed=False, indices=sources))


def verify(G: WeightedGraph, H: EdgeSubset, P: DemandSet | None, spec: ErrorSpec,
           oracle: PathOracle | None = None, tol: float | None = None) -> VerificationReport:
    """Check ``d_G <= d_H <= d_G + bound`` for every pair of ``P`` (all pairs if ``None``).

    ``d_G`` and ``d_H`` are recomputed here with scipy's Dijkstra. Only
    ``W(s,t)`` is read from ``oracle`` because it depends on which shortest
    path is canonical; pass the oracle the spanner was built with. ``tol=None``
    uses the scaled default slack, a number is an absolute slack (0 = exact).
    """
    if H.host is not G and H.host != G:
        raise ValueError("edge subset is not hosted on this graph")
    if P is None:
        P = DemandSet.all_pairs(G.n)
    if oracle is None:
        oracle = build_oracle(G, 0)
    mst_w = mst_weight(G) if G.is_connected() else float("nan")
    rep = VerificationReport(len(P), edges=len(H), weight=H.weight, spec=str(spec),
                             lightness=H.weight / mst_w if mst_w > 0 else float("nan"))
    if len(P) == 0:
        return rep
    src, col = np.unique(P.s, return_inverse=True)
    dG = _sssp(G, np.arange(G.m), src)[col, P.t]
    dH = _sssp(G, H.ids(), src)[col, P.t]
    bound = np.broadcast_to(pair_bound(oracle, spec, P.s, P.t), dG.shape)
    rhs = dG + bound
    slack = dH - rhs
    slack_tol = tolerance(dH, rhs) if tol is None else tol
    low_tol = tolerance(dH, dG) if tol is None else tol
    rep.lower_bound_failures = int(np.sum(dH < dG - low_tol))
    bad = np.flatnonzero(slack > slack_tol)
    rep.violations = [Violation(int(P.s[i]), int(P.t[i]), float(dG[i]), float(dH[i]),
                                float(bound[i]), float(slack[i])) for i in bad]
    rep.slacks = slack
    rep.max_violation = float(max(0.0, np.max(slack)))
    return rep


def dlight_neighbor_count(G: WeightedGraph, H: EdgeSubset, s: int, t: int,
                          oracle: PathOracle) -> tuple[int, int]:
    """``(missing edges of pi(s,t) in H, off-path vertices joined to the path by an H edge of weight <= W(s,t))``."""
    path = oracle.path(s, t)
    verts = oracle.path_vertices(s, t)
    on_path = set(verts)
    W = oracle.max_weight(s, t)
    limit = W + tolerance(W)
    ell = sum(1 for e in path if e not in H)
    found = set()
    for x in verts:
        for e in G.incident(x).tolist():
            if H.mask[e] and G.w[e] <= limit:
                y = G.other(e, x)
                if y not in on_path:
                    found.add(y)
    return ell, len(found)


def size_scaling_fit(samples) -> tuple[float, float]:
    """Least-squares slope and intercept of ``log(value)`` against ``log(n)``."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 3:
        raise ValueError("need at least 3 (n, value) samples")
    n, val = arr[:, 0], arr[:, 1]
    if np.any(np.diff(n) <= 0):
        raise ValueError("n must be strictly increasing")
    if np.any(n <= 0) or np.any(val <= 0):
        raise ValueError("scaling fit needs positive n and values")
    slope, intercept = np.polyfit(np.log(n), np.log(val), 1)
    return float(slope), float(intercept)
