"""Sparse pairwise and all-pairs spanners with local additive error."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .completion import Spanner, complete
from .graph import DemandSet, EdgeSubset, WeightedGraph
from .initializers import d_light_init
from .paths import TIE_TOL, ErrorSpec, PathOracle, build_oracle, draw_tokens

RESAMPLE_CAP = 100


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class SparseParams:
    """Overrides for the construction parameters; ``None`` means the default formula."""

    d: int | None = None
    ell: int | None = None
    p_star: int | None = None
    k_missing_cap: int | None = None
    rounds: int | None = None
    C: float = 3.0
    resample_cap: int = RESAMPLE_CAP

    @classmethod
    def coerce(cls, params) -> "SparseParams":
        if params is None:
            return cls()
        if isinstance(params, cls):
            return params
        return cls(**dict(params))


def clamp_param(x: float, n: int) -> int:
    """Ceiling of ``x`` clamped to ``[1, n]``."""
    return int(min(max(math.ceil(x - 1e-9), 1), max(n, 1)))


def prefix_suffix(missing: list, ell: int) -> list:
    """First and last ``ell`` entries, or everything if there are at most ``2 * ell``."""
    if len(missing) <= 2 * ell:
        return list(missing)
    return list(missing[:ell]) + list(missing[-ell:])


def sample_vertices(rng: np.random.Generator, n: int, prob: float, cap: float,
                    seed=None, tries: int = RESAMPLE_CAP) -> np.ndarray:
    """Bernoulli(prob) vertex sample, redrawn while it exceeds ``cap`` vertices."""
    prob = min(prob, 1.0)
    for _ in range(tries + 1):
        R = np.flatnonzero(rng.random(n) < prob)
        if len(R) <= cap:
            return R
    raise SamplingError(f"sample exceeded cap {cap:g} after {tries} redraws (seed {seed})")


def _oracle(G, seed, oracle) -> PathOracle:
    if oracle is None:
        return build_oracle(G, seed)
    if oracle.graph is not G and oracle.graph != G:
        raise ValueError("oracle was built for a different graph")
    return oracle


def _check_pairs(P: DemandSet, G: WeightedGraph):
    if len(P) == 0:
        raise ValueError("demand set is empty")
    if P.n != G.n:
        raise ValueError(f"demand set is over {P.n} vertices, graph has {G.n}")


def _oblivious_then_complete(G, P, spec, d, ell, oracle) -> Spanner:
    H = Spanner(oracle, d_light_init(G, d))
    todo = np.flatnonzero(H.unsatisfied(P, spec))
    for i in todo.tolist():
        s, t = (int(x) for x in P.pairs[i])
        if H.satisfied(s, t, spec):
            continue
        miss = H.missing(oracle.path(s, t))
        H.add_path(s, t, "prefix", edges=prefix_suffix(miss, ell))
    res = complete(H, P, spec)
    H.info.update(d=d, ell=ell, completion_insertions=res.insertions)
    return H


def build_pairwise_2eps(G: WeightedGraph, P: DemandSet, eps: float, seed: int = 0,
                        params=None, oracle: PathOracle | None = None) -> Spanner:
    """Deterministic pairwise spanner with error ``(2 + eps) W(s,t)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    _check_pairs(P, G)
    prm = SparseParams.coerce(params)
    p, n = len(P), G.n
    d = prm.d or clamp_param(p ** (1 / 3), n)
    ell = prm.ell or clamp_param(n / p ** (2 / 3), n)
    return _oblivious_then_complete(G, P, ErrorSpec(2, eps), d, ell, _oracle(G, seed, oracle))


def build_pairwise_6eps(G: WeightedGraph, P: DemandSet, eps: float, seed: int = 0,
                        params=None, oracle: PathOracle | None = None) -> Spanner:
    """Deterministic pairwise spanner with error ``(6 + eps) W(s,t)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    _check_pairs(P, G)
    prm = SparseParams.coerce(params)
    p, n = len(P), G.n
    d = prm.d or clamp_param(p ** 0.25, n)
    ell = prm.ell or clamp_param(n / p ** 0.75, n)
    return _oblivious_then_complete(G, P, ErrorSpec(6, eps), d, ell, _oracle(G, seed, oracle))


def _slack_loop(oracle, P0, spec, p_star, one_round, seed) -> Spanner:
    """Repeat a partial construction until at most ``p_star`` pairs are unsatisfied.

    An iteration that satisfies nothing is followed by a direct patch of the
    first unsatisfied pair, so the loop runs at most ``|P0|`` times.
    """
    H = Spanner(oracle)
    cur = P0.subset(H.unsatisfied(P0, spec))
    history = [len(cur)]
    it = 0
    while len(cur) > p_star:
        rng = np.random.default_rng([seed, it])
        one_round(H, cur, rng)
        nxt = cur.subset(H.unsatisfied(cur, spec))
        if len(nxt) == len(cur):
            s, t = (int(x) for x in nxt.pairs[0])
            H.add_path(s, t, "fallback")
            nxt = nxt.subset(H.unsatisfied(nxt, spec))
        cur = nxt
        history.append(len(cur))
        it += 1
    for s, t in cur.pairs.tolist():
        if not H.satisfied(s, t, spec):
            H.add_path(s, t, "direct")
    H.info.update(iterations=it, unsatisfied_history=history, survivors=len(cur))
    return H


def build_pairwise_2W(G: WeightedGraph, P: DemandSet, seed: int = 0, params=None,
                      oracle: PathOracle | None = None) -> Spanner:
    """Randomized pairwise spanner with error ``2 W(s,t)``."""
    _check_pairs(P, G)
    prm = SparseParams.coerce(params)
    o = _oracle(G, seed, oracle)
    n = G.n
    spec = ErrorSpec(2)
    p_star = prm.p_star if prm.p_star is not None else clamp_param(len(P) ** (1 / 3), len(P))

    def one_round(H: Spanner, cur: DemandSet, rng):
        p = len(cur)
        d = prm.d or clamp_param(p ** (1 / 3), n)
        ell = prm.ell or clamp_param(n / p ** (2 / 3), n)
        H.add_edges(d_light_init(G, d).ids())
        for i in np.flatnonzero(H.unsatisfied(cur, spec)).tolist():
            s, t = (int(x) for x in cur.pairs[i])
            if len(H.missing(o.path(s, t))) < ell and not H.satisfied(s, t, spec):
                H.add_path(s, t, "direct")
        R = sample_vertices(rng, n, 6 / (d * ell), 6 * n / (d * ell), seed, prm.resample_cap)
        for r in R.tolist():
            H.add_tree(r)

    return _slack_loop(o, P, spec, p_star, one_round, seed)


def constrained_shortest_path(G: WeightedGraph, H, u: int, v: int, k: int,
                              tokens: np.ndarray | None = None) -> list | None:
    """Shortest ``u``-``v`` path using at most ``k`` edges outside ``H``.

    Ties follow the same ``(length, token sum, hops)`` key as the canonical
    paths. Returns edge ids ordered from ``u``, or ``None`` if no path qualifies.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if u == v:
        return []
    in_h = H.mask if hasattr(H, "mask") else np.asarray(H, dtype=bool)
    if tokens is None:
        tokens = draw_tokens(G.m, 0)
    dist, pert, hops, pred_e, pred_s = _kernels.layered_sssp(
        G.indptr, G.adj_v, G.adj_e, G.w, tokens, in_h, u, k, TIE_TOL)
    st = _kernels.best_layer(dist, pert, hops, v, k, TIE_TOL)
    if st < 0:
        return None
    out = []
    while pred_e[st] >= 0:
        out.append(int(pred_e[st]))
        st = pred_s[st]
    out.reverse()
    return out


def _connect_sample(G, o, H: Spanner, R: np.ndarray, in_h: np.ndarray, k: int, stage: str):
    """Insert the constrained path between every two sampled vertices."""
    mask = np.zeros(G.m, dtype=bool)
    for i in range(len(R) - 1):
        dist, pert, hops, pred_e, pred_s = _kernels.layered_sssp(
            G.indptr, G.adj_v, G.adj_e, G.w, o.tokens, in_h, int(R[i]), k, TIE_TOL)
        _kernels.mark_layered_paths(dist, pert, hops, pred_e, pred_s, R[i + 1:], k, TIE_TOL, mask)
    new = H.add_edges(np.flatnonzero(mask))
    H.info.setdefault("connector_edges", 0)
    H.info["connector_edges"] += len(new)
    return new


def build_pairwise_4W(G: WeightedGraph, P: DemandSet, seed: int = 0, params=None,
                      oracle: PathOracle | None = None) -> Spanner:
    """Randomized pairwise spanner with error ``4 W(s,t)``."""
    _check_pairs(P, G)
    prm = SparseParams.coerce(params)
    o = _oracle(G, seed, oracle)
    n = G.n
    spec = ErrorSpec(4)
    p_star = prm.p_star if prm.p_star is not None else clamp_param(len(P) ** (2 / 7), len(P))

    def one_round(H: Spanner, cur: DemandSet, rng):
        p = len(cur)
        d = prm.d or clamp_param(p ** (2 / 7), n)
        ell = prm.ell or clamp_param(n / p ** (5 / 7), n)
        far = n / d ** 2
        k = prm.k_missing_cap or clamp_param(far, n)
        H.add_edges(d_light_init(G, d).ids())
        for i in np.flatnonzero(H.unsatisfied(cur, spec)).tolist():
            s, t = (int(x) for x in cur.pairs[i])
            if len(H.missing(o.path(s, t))) <= ell and not H.satisfied(s, t, spec):
                H.add_path(s, t, "direct")
        R1 = sample_vertices(rng, n, 6 * d / n, 6 * d, seed, prm.resample_cap)
        for r in R1.tolist():
            H.add_tree(r)
        # classified against the spanner as it stands after the trees
        for i in np.flatnonzero(H.unsatisfied(cur, spec)).tolist():
            s, t = (int(x) for x in cur.pairs[i])
            miss = H.missing(o.path(s, t))
            if ell < len(miss) < far:
                H.add_path(s, t, "prefix", edges=prefix_suffix(miss, ell))
        R2 = sample_vertices(rng, n, 6 / (d * ell), 6 * n / (d * ell), seed, prm.resample_cap)
        _connect_sample(G, o, H, R2, H.mask.copy(), k, "connect")

    return _slack_loop(o, P, spec, p_star, one_round, seed)


def build_allpairs_4W(G: WeightedGraph, seed: int = 0, C: float | None = None, params=None,
                      oracle: PathOracle | None = None) -> Spanner:
    """All-pairs spanner with error ``4 W(s,t)``.

    Independent randomized rounds are unioned until every pair is satisfied;
    a final completion pass with the same bound makes the guarantee
    unconditional. ``H.info["safety_insertions"]`` counts what that pass did.
    """
    prm = SparseParams.coerce(params)
    if C is not None:
        prm = replace(prm, C=C)
    if not prm.C > 0:
        raise ValueError("C must be positive")
    o = _oracle(G, seed, oracle)
    n = G.n
    spec = ErrorSpec(4)
    P = DemandSet.all_pairs(n)
    H = Spanner(o)
    if len(P) == 0:
        return H
    d = prm.d or clamp_param(n ** 0.4, n)
    k = prm.k_missing_cap or clamp_param(n / d ** 2, n)
    rounds = prm.rounds or max(1, math.ceil(prm.C * math.log(n)))
    init = d_light_init(G, d)
    used = 0
    for r in range(rounds):
        rng = np.random.default_rng([seed, r])
        H.add_edges(init.ids())
        R1 = sample_vertices(rng, n, 6 * d / n, 6 * d, seed, prm.resample_cap)
        for x in R1.tolist():
            H.add_tree(x)
        R2 = sample_vertices(rng, n, 6 / d, 6 * n / d, seed, prm.resample_cap)
        _connect_sample(G, o, H, R2, init.mask, k, "connect")
        used = r + 1
        if not H.unsatisfied(P, spec).any():
            break
    res = complete(H, P, spec, stage="safety")
    H.info.update(d=d, k=k, rounds=used, rounds_max=rounds, safety_insertions=res.insertions)
    return H
