import csv
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from addspan.completion import (
    LOG_COLUMNS, REBUILD_AT, Spanner, complete, completion_order, member_distances,
    spanner_distance, write_log,
)
from addspan.generators import generate
from addspan.graph import DemandSet, EdgeSubset, WeightedGraph, minimum_spanning_tree
from addspan.paths import ErrorSpec, build_oracle
from addspan.verify import verify

from conftest import connected_graphs
from oracles import brute_distance, floyd


def test_full_graph_needs_nothing():
    G = generate("gnp", {"n": 20, "p": 0.3}, "uniform:1:10", 0)
    H = Spanner(build_oracle(G), EdgeSubset.full(G))
    assert complete(H, DemandSet.all_pairs(20), ErrorSpec(0)).insertions == 0


def test_tree_needs_nothing():
    G = WeightedGraph(5, [(0, 1, 2), (1, 2, 1), (1, 3, 4), (3, 4, 1)])
    H = Spanner(build_oracle(G), minimum_spanning_tree(G))
    assert complete(H, DemandSet.all_pairs(5), ErrorSpec(0)).insertions == 0


def test_triangle(triangle):
    o = build_oracle(triangle)
    for spec in (ErrorSpec(2), ErrorSpec(0)):
        H = Spanner(o, minimum_spanning_tree(triangle))
        assert complete(H, DemandSet.all_pairs(3), spec).insertions == 0
        assert H.distance(0, 2) == 2.0


def test_forced_insertion():
    # the heavy detour 0-2-1 (10 + 10) exceeds d_G(0,1) + 2 W(0,1) = 3
    G = WeightedGraph(3, [(0, 1, 1.0), (0, 2, 10.0), (1, 2, 10.0)])
    H = Spanner(build_oracle(G), [1, 2])
    res = complete(H, DemandSet([(0, 1)], 3), ErrorSpec(2))
    assert res.insertions == 1
    assert res.records[0].edges == (0,)
    assert H.distance(0, 1) == 1.0


def test_empty_spanner_distance():
    G = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    H = Spanner(build_oracle(G))
    assert spanner_distance(H, 0, 2) == np.inf
    assert spanner_distance(H, 1, 1) == 0.0


def test_full_spanner_distance_is_dG():
    G = generate("gnp", {"n": 25, "p": 0.3}, "uniform:1:10", 2)
    o = build_oracle(G)
    H = Spanner(o, EdgeSubset.full(G))
    assert np.allclose(H.matrix(), o.dist, rtol=1e-12)


@pytest.mark.parametrize("batch", [1, 7, REBUILD_AT + 5])
def test_incremental_matches_fresh(batch):
    G = generate("gnp", {"n": 60, "p": 0.2}, "uniform:1:10", 3)
    H = Spanner(build_oracle(G), minimum_spanning_tree(G))
    rng = np.random.default_rng(batch)
    order = rng.permutation(G.m)
    for k in range(0, min(G.m, 4 * batch), batch):
        H.add_edges(order[k:k + batch])
        fresh = member_distances(G, H.mask)
        assert np.allclose(H.matrix(), fresh, rtol=1e-12, atol=0)


def test_incremental_brute_force():
    G = WeightedGraph(6, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 2.5), (1, 4, 1.5)])
    H = Spanner(build_oracle(G), [0, 1, 2, 3, 4])
    H.matrix()
    H.add_edges([5])
    H.add_edges([6])
    for s in range(6):
        for t in range(6):
            assert H.distance(s, t) == pytest.approx(brute_distance(G, s, t, H.mask))


@given(connected_graphs(max_n=12), st.lists(st.integers(0, 200), max_size=10))
def test_distances_only_shrink(G, adds):
    H = Spanner(build_oracle(G), minimum_spanning_tree(G))
    prev = H.matrix().copy()
    for a in adds:
        H.add_edges([a % G.m])
        cur = H.matrix()
        assert np.all(cur <= prev + 1e-12)
        prev = cur.copy()
    assert np.allclose(prev, floyd(G, H.mask))


def test_order_is_lexicographic():
    G = generate("gnp", {"n": 30, "p": 0.2}, "uniform:1:10", 1)
    o = build_oracle(G)
    P = DemandSet.all_pairs(30)
    keys = [(o.maxw[s, t], o.dist[s, t], s, t) for s, t in P.pairs[completion_order(o, P)].tolist()]
    assert keys == sorted(keys)


@given(connected_graphs(min_n=3, max_n=14), st.integers(0, 10_000), st.sampled_from([0.0, 1.0, 2.0, 4.0]))
def test_any_order_gives_valid_spanner(G, seed, c):
    o = build_oracle(G)
    P = DemandSet.all_pairs(G.n)
    spec = ErrorSpec(c, 0.1)
    H = Spanner(o, minimum_spanning_tree(G))
    order = np.random.default_rng(seed).permutation(len(P))
    complete(H, P, spec, order=order)
    assert verify(G, H.members, P, spec, oracle=o).ok


@given(connected_graphs(min_n=3, max_n=14))
def test_canonical_order_deterministic(G):
    o = build_oracle(G)
    P = DemandSet.all_pairs(G.n)
    a, b = Spanner(o), Spanner(o)
    complete(a, P, ErrorSpec(2))
    complete(b, P, ErrorSpec(2))
    assert a.members == b.members and a.log == b.log


def test_zero_error_completion_is_exact():
    G = generate("gnp", {"n": 30, "p": 0.3}, "uniform:1:10", 5)
    o = build_oracle(G)
    H = Spanner(o)
    complete(H, DemandSet.all_pairs(30), ErrorSpec(0))
    assert np.allclose(H.matrix(), o.dist, rtol=1e-12)


def test_log_csv():
    G = WeightedGraph(3, [(0, 1, 1.0), (0, 2, 10.0), (1, 2, 10.0)])
    H = Spanner(build_oracle(G), [1, 2])
    complete(H, DemandSet([(0, 1)], 3), ErrorSpec(2))
    text = write_log(H.log, comments=["run: test"])
    lines = text.splitlines()
    assert lines[0] == "# run: test"
    rows = list(csv.reader(io.StringIO("\n".join(lines[1:]))))
    assert tuple(rows[0]) == LOG_COLUMNS
    assert rows[1] == ["0", "1", "1.0", "1.0", "1", "complete"]


def test_readonly_mask():
    G = WeightedGraph(2, [(0, 1, 1.0)])
    H = Spanner(build_oracle(G))
    with pytest.raises(ValueError):
        H.mask[0] = True
