"""Acceptance suite: one test per criterion, each at its stated tolerance.

Sweeps go through the CLI trial runner, so any row can be reproduced with
``addspan sweep`` and the same flags. All random graphs are G(n, 1/2) with
uniform(1, 10) weights unless a criterion says otherwise.

Run on its own with ``python3 -m pytest tests/test_acceptance.py -v``.
"""
import math

import numpy as np
import pytest

from addspan import (
    DemandSet, EdgeSubset, ErrorSpec, WeightedGraph, build_4eps_light, build_allpairs_4W,
    build_eps_light, build_oracle, build_pairwise_2eps, build_pairwise_2W, build_pairwise_4W,
    build_pairwise_6eps, d_light_init, d_lightweight_init, generate, minimum_spanning_tree,
    preprocess_light, random_pairs, subdivide_mst, verify,
)
from addspan.cli import build_parser, run_trial
from addspan.light import edge_neighborhood, lightweight_neighbor_count
from addspan.verify import dlight_neighbor_count, size_scaling_fit

from conftest import random_connected
from oracles import brute_canonical, brute_distance, path_length
from test_light import heavy_gap_fixture

P_EDGE = 0.5
WEIGHTS = "uniform:1:10"
ALGOS = ["2eps", "6eps", "2w", "4w", "allpairs4w", "epslight", "4epslight"]
DETERMINISTIC = {"2eps", "6eps", "epslight", "4epslight"}


def sweep_args(algo, *extra):
    argv = ["sweep", "--algo", algo, "--sizes", "1", "--p", str(P_EDGE), "--weights", WEIGHTS, *extra]
    if algo in ("2eps", "6eps", "epslight", "4epslight"):
        argv += ["--eps", "0.5"]
    return build_parser().parse_args(argv)


def medians(algo, sizes, trials, metric, *extra):
    args = sweep_args(algo, *extra)
    rows = [run_trial(args, n, tr) for n in sizes for tr in range(trials)]
    meds = [(n, float(np.median([r[metric] for r in rows if r["n"] == n]))) for n in sizes]
    return rows, meds


def label(record_property, text, measured):
    record_property("criterion", text)
    record_property("measured", measured)


def test_c01_correctness(record_property):
    bad, runs = [], 0
    for algo in ALGOS:
        rows, _ = medians(algo, [32, 64, 128], 10, "edges")
        runs += len(rows)
        bad += [(algo, r["n"], r["trial"], r["violations"]) for r in rows if r["violations"]]
    label(record_property, "01 correctness, 7 algorithms x n{32,64,128} x 10 seeds",
          f"runs={runs} violating_runs={len(bad)}")
    assert not bad


def test_c02_unweighted(record_property):
    fails = []
    for seed in range(10):
        G = generate("gnp", {"n": 64, "p": P_EDGE}, "unit", seed)
        P = random_pairs(64, 128, seed)
        for build, c in ((build_pairwise_2eps, 2), (build_pairwise_6eps, 6)):
            H = build(G, P, 0.5, seed)
            rep = verify(G, H.members, P, ErrorSpec.global_(c), oracle=H.oracle, tol=0)
            if not rep.ok:
                fails.append((c, seed, len(rep.violations)))
    label(record_property, "02 unit weights: 2eps is +2, 6eps is +6 (tol 0)", f"failures={len(fails)}")
    assert not fails


def test_c03_dlight_neighbours(record_property):
    rng = np.random.default_rng(2024)
    samples = fails = 0
    kinds = ["unit", "uniform", "exponential"]
    while samples < 500:
        n = int(rng.integers(8, 41))
        G = random_connected(rng, n, p=float(rng.uniform(0.15, 0.6)), weights=kinds[samples % 3])
        o = build_oracle(G, int(rng.integers(1 << 30)))
        d = int(rng.choice([2, 3, 5]))
        H = d_light_init(G, d)
        s, t = (int(x) for x in rng.choice(n, 2, replace=False))
        ell, cnt = dlight_neighbor_count(G, H, s, t, o)
        if ell >= 1:
            samples += 1
            fails += cnt < math.ceil(d * ell / 6)
    label(record_property, "03 d-light neighbours >= ceil(d*ell/6)", f"samples={samples} failures={fails}")
    assert fails == 0


def test_c04_lightweight_neighbours(record_property):
    rng = np.random.default_rng(99)
    samples = fails = 0
    for inst in range(300):
        n = int(rng.integers(8, 41))
        Gp = preprocess_light(random_connected(rng, n, p=float(rng.uniform(0.15, 0.6)),
                                               weights=["uniform", "exponential"][inst % 2])).graph
        o = build_oracle(Gp, inst)
        d = [0.0, n ** (2 / 3)][inst % 2]
        H = d_lightweight_init(Gp, d)
        SG = subdivide_mst(Gp)
        for _ in range(4):
            s, t = (int(x) for x in rng.choice(n, 2, replace=False))
            eps_p = float(rng.choice([0.25, 0.5, 1.0]))
            cnt, z = lightweight_neighbor_count(SG, H, s, t, eps_p, o)
            if z > 0:
                samples += 1
                fails += cnt < eps_p * z / 10
    G, ix, e_i = heavy_gap_fixture()
    N = edge_neighborhood(subdivide_mst(G), e_i, 0.5, u=ix["ui"])
    label(record_property, "04 lightweight neighbours >= eps'*z/10; weight-5.2 fixture |N_i|=5",
          f"samples={samples} failures={fails} |N_i|={len(N)}")
    assert fails == 0 and samples > 0
    assert len(N) == 5


def test_c05_complete_graph_lightness(record_property):
    got = {}
    for n in (6, 10, 20):
        K = WeightedGraph(n, [(a, b, 1.0) for a in range(n) for b in range(a + 1, n)])
        _, rep = build_eps_light(K, 0.5)
        got[n] = rep.lightness
    label(record_property, "05 unit K_n lightness = n/2", " ".join(f"n={n}:{v!r}" for n, v in got.items()))
    assert all(abs(v - n / 2) <= 1e-9 for n, v in got.items())


def test_c06_lightness_scaling(record_property):
    sizes = [32, 64, 128, 256]
    _, m1 = medians("epslight", sizes, 10, "lightness")
    _, m2 = medians("4epslight", sizes, 10, "lightness")
    s1, _ = size_scaling_fit(m1)
    s2, _ = size_scaling_fit(m2)
    label(record_property, "06 lightness slopes: epslight <= 1.15, 4epslight <= 0.85",
          f"epslight={s1:.4f} 4epslight={s2:.4f}")
    assert s1 <= 1.15 and s2 <= 0.85


def test_c07a_allpairs_size_scaling(record_property):
    _, m = medians("allpairs4w", [64, 128, 256, 512], 10, "edges")
    slope, _ = size_scaling_fit(m)
    label(record_property, "07a allpairs4w size slope <= 1.55",
          f"slope={slope:.4f} medians={[int(v) for _, v in m]}")
    assert slope <= 1.55


def test_c07b_pairwise_size_scaling(record_property):
    # |P| = n^2 exceeds the number of distinct pairs, so every pair is demanded
    _, m = medians("2eps", [32, 64, 128, 256], 10, "edges", "--pairs-scale", "1", "--pairs-power", "2")
    slope, _ = size_scaling_fit(m)
    label(record_property, "07b 2eps (|P| = n^2) size slope <= 1.75", f"slope={slope:.4f}")
    assert slope <= 1.75


def test_c08_oracle_equivalence(record_property):
    rng = np.random.default_rng(8)
    mism = graphs = 0
    spec = ErrorSpec(2, 0.5)
    while graphs < 200:
        n = int(rng.integers(2, 8))
        G = random_connected(rng, n, p=float(rng.uniform(0.3, 1.0)))
        graphs += 1
        o = build_oracle(G, graphs)
        H = EdgeSubset(G, rng.random(G.m) < 0.5) | minimum_spanning_tree(G)
        P = DemandSet.all_pairs(n)
        rep = verify(G, H, P, spec, oracle=o)
        for k, (s, t) in enumerate(P.pairs.tolist()):
            p = brute_canonical(G, o.tokens, s, t)
            dG = path_length(G, p)
            W = max(float(G.w[e]) for e in p)
            slack = brute_distance(G, s, t, H.mask) - (dG + spec.factor * W)
            if (o.path(s, t) != p or o.distance(s, t) != dG or o.max_weight(s, t) != W
                    or rep.slacks[k] != slack):
                mism += 1
    label(record_property, "08 oracle = brute force (paths, d_G, W, slacks), n <= 7",
          f"graphs={graphs} mismatches={mism}")
    assert mism == 0


def _build(algo, G, P, seed):
    if algo == "2eps":
        return build_pairwise_2eps(G, P, 0.5, seed)
    if algo == "6eps":
        return build_pairwise_6eps(G, P, 0.5, seed)
    if algo == "2w":
        return build_pairwise_2W(G, P, seed)
    if algo == "4w":
        return build_pairwise_4W(G, P, seed)
    if algo == "allpairs4w":
        return build_allpairs_4W(G, seed)
    if algo == "epslight":
        return build_eps_light(G, 0.5, seed)[0]
    return build_4eps_light(G, 0.5, seed)[0]


def test_c09_determinism(record_property):
    diffs = []
    for seed in range(3):
        G = generate("gnp", {"n": 64, "p": P_EDGE}, WEIGHTS, seed)
        P = random_pairs(64, 128, seed)
        for algo in ALGOS:
            a, b = _build(algo, G, P, seed), _build(algo, G, P, seed)
            if not (np.array_equal(a.mask, b.mask) and a.log == b.log):
                diffs.append((algo, seed))
    label(record_property, "09 determinism: repeated builds are bit-identical", f"differences={len(diffs)}")
    assert not diffs


def test_c10_subpath_consistency(record_property):
    bad = 0
    for g in range(20):
        G = generate("gnp", {"n": 64, "p": P_EDGE}, "unit" if g % 2 else WEIGHTS, 1000 + g)
        o = build_oracle(G, g)
        bad += o.check_subpaths(500, np.random.default_rng(g))
    label(record_property, "10 subpath consistency, 20 graphs x 500 triples", f"violations={bad}")
    assert bad == 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
