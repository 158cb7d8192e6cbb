"""Estimator-style wrappers: ``fit`` builds the spanner, ``transform`` returns it as a graph."""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import light, sparse
from .graph import WeightedGraph, mst_weight
from .paths import ErrorSpec, build_oracle
from .validation import check_eps, check_graph, check_pairs
from .verify import verify


class _SpannerBase(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    pairwise = False

    def _spec(self) -> ErrorSpec:
        raise NotImplementedError

    def _build(self, G, P, oracle):
        raise NotImplementedError

    def fit(self, X, y=None, pairs=None):
        """Build the spanner of ``X``; pairwise variants need ``pairs`` (or ``y``)."""
        G = check_graph(X)
        P = check_pairs(pairs if pairs is not None else y, G.n)
        if self.pairwise and P is None:
            raise ValueError(f"{type(self).__name__} needs a demand set")
        oracle = build_oracle(G, self.seed)
        H = self._build(G, P, oracle)
        self.graph_ = G
        self.pairs_ = P
        self.oracle_ = oracle
        self.spanner_ = H
        self.edge_mask_ = H.members.mask
        self.log_ = list(H.log)
        self.info_ = dict(H.info)
        self.n_edges_ = len(H)
        self.weight_ = H.weight
        mw = mst_weight(G)
        self.lightness_ = H.weight / mw if mw > 0 else float("nan")
        return self

    def _check_fitted(self):
        if not hasattr(self, "spanner_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")

    def transform(self, X=None) -> WeightedGraph:
        """The spanner as a graph on the same vertices (edges in host id order)."""
        self._check_fitted()
        if X is not None and check_graph(X) != self.graph_:
            raise ValueError("transform only applies to the fitted graph")
        return self.graph_.subgraph(self.spanner_.members.ids())

    def verify(self, tol=None):
        self._check_fitted()
        return verify(self.graph_, self.spanner_.members, self.pairs_, self._spec(),
                      oracle=self.oracle_, tol=tol)

    @property
    def spec(self) -> ErrorSpec:
        return self._spec()


class Pairwise2EpsSpanner(_SpannerBase):
    """Deterministic pairwise spanner, error ``(2 + eps) W(s,t)``."""

    pairwise = True

    def __init__(self, eps=0.5, seed=0, d=None, ell=None):
        self.eps = eps
        self.seed = seed
        self.d = d
        self.ell = ell

    def _spec(self):
        return ErrorSpec(2, check_eps(self.eps))

    def _build(self, G, P, oracle):
        return sparse.build_pairwise_2eps(G, P, check_eps(self.eps), self.seed,
                                          sparse.SparseParams(d=self.d, ell=self.ell), oracle)


class Pairwise6EpsSpanner(Pairwise2EpsSpanner):
    """Deterministic pairwise spanner, error ``(6 + eps) W(s,t)``."""

    def _spec(self):
        return ErrorSpec(6, check_eps(self.eps))

    def _build(self, G, P, oracle):
        return sparse.build_pairwise_6eps(G, P, check_eps(self.eps), self.seed,
                                          sparse.SparseParams(d=self.d, ell=self.ell), oracle)


class Pairwise2WSpanner(_SpannerBase):
    """Randomized pairwise spanner, error ``2 W(s,t)``."""

    pairwise = True

    def __init__(self, seed=0, d=None, ell=None, p_star=None):
        self.seed = seed
        self.d = d
        self.ell = ell
        self.p_star = p_star

    def _params(self):
        return sparse.SparseParams(d=self.d, ell=self.ell, p_star=self.p_star)

    def _spec(self):
        return ErrorSpec(2)

    def _build(self, G, P, oracle):
        return sparse.build_pairwise_2W(G, P, self.seed, self._params(), oracle)


class Pairwise4WSpanner(_SpannerBase):
    """Randomized pairwise spanner, error ``4 W(s,t)``."""

    pairwise = True

    def __init__(self, seed=0, d=None, ell=None, p_star=None, k_missing_cap=None):
        self.seed = seed
        self.d = d
        self.ell = ell
        self.p_star = p_star
        self.k_missing_cap = k_missing_cap

    def _spec(self):
        return ErrorSpec(4)

    def _build(self, G, P, oracle):
        prm = sparse.SparseParams(d=self.d, ell=self.ell, p_star=self.p_star, k_missing_cap=self.k_missing_cap)
        return sparse.build_pairwise_4W(G, P, self.seed, prm, oracle)


class AllPairs4WSpanner(_SpannerBase):
    """All-pairs spanner, error ``4 W(s,t)``; pairs are ignored."""

    def __init__(self, seed=0, C=3.0, d=None, rounds=None, k_missing_cap=None):
        self.seed = seed
        self.C = C
        self.d = d
        self.rounds = rounds
        self.k_missing_cap = k_missing_cap

    def _spec(self):
        return ErrorSpec(4)

    def fit(self, X, y=None, pairs=None):
        return super().fit(X)

    def _build(self, G, P, oracle):
        prm = sparse.SparseParams(d=self.d, rounds=self.rounds, k_missing_cap=self.k_missing_cap)
        return sparse.build_allpairs_4W(G, self.seed, self.C, prm, oracle)


class EpsLightSpanner(_SpannerBase):
    """All-pairs lightweight spanner, error ``eps W(s,t)``."""

    def __init__(self, eps=0.5, seed=0):
        self.eps = eps
        self.seed = seed

    def _spec(self):
        return ErrorSpec(0, check_eps(self.eps))

    def fit(self, X, y=None, pairs=None):
        super().fit(X)
        self.report_ = self.info_["report"]
        return self

    def _build(self, G, P, oracle):
        H, _ = light.build_eps_light(G, check_eps(self.eps), self.seed, oracle)
        return H


class FourEpsLightSpanner(EpsLightSpanner):
    """All-pairs lightweight spanner, error ``(4 + eps) W(s,t)``."""

    def __init__(self, eps=0.5, seed=0, d=None):
        self.eps = eps
        self.seed = seed
        self.d = d

    def _spec(self):
        return ErrorSpec(4, check_eps(self.eps))

    def _build(self, G, P, oracle):
        H, _ = light.build_4eps_light(G, check_eps(self.eps), self.seed, self.d, oracle)
        return H


ALGORITHMS = {
    "2eps": Pairwise2EpsSpanner,
    "6eps": Pairwise6EpsSpanner,
    "2w": Pairwise2WSpanner,
    "4w": Pairwise4WSpanner,
    "allpairs4w": AllPairs4WSpanner,
    "epslight": EpsLightSpanner,
    "4epslight": FourEpsLightSpanner,
}
NEEDS_EPS = {"2eps", "6eps", "epslight", "4epslight"}
PAIRWISE = {"2eps", "6eps", "2w", "4w"}
LIGHT = {"epslight", "4epslight"}


def make_estimator(algo: str, **params) -> _SpannerBase:
    try:
        cls = ALGORITHMS[algo]
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}") from None
    accepted = cls._get_param_names()
    unknown = set(params) - set(accepted)
    if unknown:
        raise ValueError(f"{algo} does not take {', '.join(sorted(unknown))}")
    return cls(**params)
