import csv
import io
import itertools
import math

import numpy as np
import pytest

from addspan.generators import generate
from addspan.graph import DemandSet, EdgeSubset, WeightedGraph, minimum_spanning_tree
from addspan.initializers import d_lightweight_init, preprocess_light, subdivide_mst
from addspan.light import (
    REPORT_COLUMNS, build_4eps_light, build_eps_light, edge_neighborhood,
    lightweight_neighbor_count, mst_hop_neighborhood, single_edge_neighbor_count, write_reports,
)
from addspan.paths import ErrorSpec, build_oracle
from addspan.verify import verify

from conftest import random_connected


def unit_complete(n):
    return WeightedGraph(n, [(a, b, 1.0) for a, b in itertools.combinations(range(n), 2)])


def tree_graph(n=12, seed=0):
    rng = np.random.default_rng(seed)
    return WeightedGraph(n, [(int(rng.integers(0, i)), i, float(rng.uniform(1, 5))) for i in range(1, n)])


@pytest.mark.parametrize("build", [build_eps_light, build_4eps_light])
def test_tree_is_returned(build):
    G = tree_graph()
    H, rep = build(G, 0.5)
    assert len(H) == G.m
    assert rep.lightness == pytest.approx(1.0)


@pytest.mark.parametrize("n", [6, 10, 20])
def test_complete_graph_keeps_everything(n):
    H, rep = build_eps_light(unit_complete(n), 0.5)
    assert len(H) == n * (n - 1) // 2
    assert abs(rep.lightness - n / 2) <= 1e-9


def test_eps_light_valid_n64():
    G = generate("gnp", {"n": 64, "p": 0.2}, "uniform:1:10", 0)
    H, rep = build_eps_light(G, 0.25)
    assert verify(G, H.members, None, ErrorSpec(0, 0.25), oracle=H.oracle).ok


def test_4eps_light_valid_n64():
    G = generate("gnp", {"n": 64, "p": 0.2}, "uniform:1:10", 0)
    H, rep = build_4eps_light(G, 0.5)
    assert verify(G, H.members, None, ErrorSpec(4, 0.5), oracle=H.oracle).ok
    assert rep.d == math.ceil(64 ** (2 / 3) - 1e-9)


def test_4eps_light_huge_budget():
    G = generate("gnp", {"n": 30, "p": 0.3}, "uniform:1:10", 1)
    H, rep = build_4eps_light(G, 0.5, d=1e9)
    assert rep.completion_insertions == 0 and len(H) == preprocess_light(G).graph.m


def test_lightness_identity():
    G = generate("gnp", {"n": 48, "p": 0.3}, "exponential:1", 2)
    for build in (build_eps_light, build_4eps_light):
        H, rep = build(G, 0.5)
        indep = H.weight / minimum_spanning_tree(G).weight
        assert rep.lightness == pytest.approx(indep, rel=1e-9)
        Hp = H.info["preprocessed"]
        assert rep.spanner_weight == pytest.approx(Hp.weight, rel=1e-12)
        assert rep.mst_weight == pytest.approx(G.n / 2, rel=1e-12)


def test_log_mapped_back_to_original():
    G = generate("gnp", {"n": 40, "p": 0.3}, "uniform:1:10", 4)
    H, _ = build_eps_light(G, 0.5)
    o = H.oracle
    for r in H.log:
        assert r.W == pytest.approx(o.max_weight(r.s, r.t), rel=1e-9)
        assert set(r.edges) <= set(o.path(r.s, r.t))


def test_first_and_last_edge_absent_before_insertion():
    for seed in range(6):
        G = generate("gnp", {"n": 48, "p": 0.3}, "uniform:1:10", seed)
        H, _ = build_4eps_light(G, 0.5, seed=seed)
        Hp = H.info["preprocessed"]
        op = Hp.oracle
        for r in Hp.log:
            p = op.path(r.s, r.t)
            assert p[0] in r.edges and p[-1] in r.edges


def test_report_csv():
    H, rep = build_eps_light(unit_complete(6), 0.5)
    text = write_reports([rep], comments=["run: x"])
    rows = list(csv.reader(io.StringIO(text.split("\n", 1)[1])))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert float(rows[1][REPORT_COLUMNS.index("lightness")]) == 3.0


def test_rejects_bad_eps():
    with pytest.raises(ValueError):
        build_eps_light(tree_graph(), 0.0)


class TestSingleEdge:
    def test_small_weight_counts_u(self):
        G = WeightedGraph(3, [(0, 1, 0.2), (1, 2, 0.2), (0, 2, 0.5)])
        SG = subdivide_mst(G)
        H = d_lightweight_init(G, 0)
        e = int(np.flatnonzero(SG.edge_origin == 2)[0])
        assert single_edge_neighbor_count(SG, H, e) >= 1

    def test_chain(self):
        G = WeightedGraph(6, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 4.0)])
        SG = subdivide_mst(G)
        H = d_lightweight_init(G, 0)
        e = int(np.flatnonzero(SG.edge_origin == 5)[0])
        cnt = single_edge_neighbor_count(SG, H, e)
        assert cnt == 5 and cnt >= 4.0 / 2

    def test_member_edge_rejected(self):
        G = WeightedGraph(2, [(0, 1, 1.0)])
        SG = subdivide_mst(G)
        with pytest.raises(ValueError):
            single_edge_neighbor_count(SG, minimum_spanning_tree(G), 0)

    def test_random_instances(self):
        rng = np.random.default_rng(2)
        sampled = 0
        while sampled < 1000:
            n = int(rng.integers(8, 40))
            G = preprocess_light(random_connected(rng, n, p=0.3, weights=["uniform", "exponential"][sampled % 2])).graph
            d = float(rng.choice([0.0, 1.0, n ** (2 / 3)]))
            H = d_lightweight_init(G, d)
            SG = subdivide_mst(G, minimum_spanning_tree(G))
            Hl = SG.lift(H)
            off = np.flatnonzero(~Hl.mask)
            for e in rng.permutation(off)[:20].tolist():
                w = float(SG.graph.w[e])
                need = max(1, math.floor(min(w, math.sqrt(d)) / 2)) if d > 0 else max(1, math.floor(w / 2))
                assert single_edge_neighbor_count(SG, Hl, e) >= need
                sampled += 1


def heavy_gap_fixture():
    """Missing edge u_i v_i of weight 5.2 beside a bold MST fragment; all bold and hub edges weigh 1."""
    names = ["s", "t", "ua", "va", "ui", "vi", "vb", "uc", "vc",
             "mst1", "mst2", "mst3", "mst4", "mst5", "mst6", "hub"]
    ix = {k: i for i, k in enumerate(names)}
    bold = [("ui", "mst1"), ("mst1", "mst2"), ("mst1", "mst3"), ("uc", "mst4"), ("mst4", "mst5"),
            ("mst5", "mst6"), ("mst6", "mst1"), ("vi", "mst5"), ("mst5", "vb")]
    hub = [("hub", x) for x in ("s", "ua", "va", "vc", "t", "mst4")]
    dotted = [("ui", "vi", 5.2), ("vi", "vb", 3.0), ("ua", "va", 2.5), ("uc", "vc", 2.5)]
    thin = [("s", "ua", 2.0), ("va", "ui", 2.0), ("vc", "t", 2.0), ("vb", "uc", 2.0)]
    rows = [(ix[a], ix[b], 1.0) for a, b in bold + hub]
    rows += [(ix[a], ix[b], w) for a, b, w in dotted + thin]
    return WeightedGraph(len(names), rows), ix, len(bold) + len(hub)


def test_heavy_gap_neighbourhood_has_five_vertices():
    G, ix, e_i = heavy_gap_fixture()
    mst = minimum_spanning_tree(G)
    assert mst.ids().tolist() == list(range(e_i))
    SG = subdivide_mst(G, mst)
    assert SG.graph == G
    N = edge_neighborhood(SG, e_i, 0.5, u=ix["ui"])
    assert len(N) == 5
    assert N == {ix[k] for k in ("ui", "mst1", "mst2", "mst3", "mst6")}
    assert mst_hop_neighborhood(SG, ix["ui"], 3) >= N | {ix["mst5"]}


def test_path_in_spanner_has_no_missing_weight():
    G = generate("gnp", {"n": 30, "p": 0.3}, "uniform:1:10", 0)
    Gp = preprocess_light(G).graph
    o = build_oracle(Gp)
    SG = subdivide_mst(Gp)
    cnt, z = lightweight_neighbor_count(SG, EdgeSubset.full(Gp), 0, 29, 0.5, o)
    assert z == 0 and cnt >= 1


def test_lightweight_count_bound_small_sample():
    rng = np.random.default_rng(7)
    hits = 0
    for trial in range(40):
        n = int(rng.integers(10, 40))
        Gp = preprocess_light(random_connected(rng, n, p=0.3)).graph
        o = build_oracle(Gp, trial)
        d = float(rng.choice([0.0, n ** (2 / 3)]))
        H = d_lightweight_init(Gp, d)
        SG = subdivide_mst(Gp)
        for _ in range(5):
            s, t = (int(x) for x in rng.choice(n, 2, replace=False))
            eps_p = float(rng.choice([0.25, 0.5, 1.0]))
            cnt, z = lightweight_neighbor_count(SG, H, s, t, eps_p, o)
            if z > 0:
                hits += 1
                assert cnt >= eps_p * z / 10
    assert hits > 20
