"""Additive graph spanners whose error is measured against the heaviest edge on each shortest path."""
from .completion import CompletionResult, InsertionRecord, Spanner, complete, completion_order
from .estimators import (
    ALGORITHMS,
    AllPairs4WSpanner,
    EpsLightSpanner,
    FourEpsLightSpanner,
    Pairwise2EpsSpanner,
    Pairwise2WSpanner,
    Pairwise4WSpanner,
    Pairwise6EpsSpanner,
    make_estimator,
)
from .generators import generate, random_pairs
from .graph import (
    DemandSet,
    DisconnectedGraphError,
    EdgeSubset,
    GraphError,
    WeightedGraph,
    lightness,
    load_graph,
    load_pairs,
    minimum_spanning_tree,
    mst_weight,
    save_graph,
    save_pairs,
)
from .initializers import d_light_init, d_lightweight_init, preprocess_light, subdivide_mst
from .light import build_4eps_light, build_eps_light
from .paths import ErrorSpec, PathOracle, build_oracle, canonical_path
from .sparse import (
    build_allpairs_4W,
    build_pairwise_2eps,
    build_pairwise_2W,
    build_pairwise_4W,
    build_pairwise_6eps,
    constrained_shortest_path,
)
from .verify import VerificationReport, verify

__version__ = "0.1.0"
