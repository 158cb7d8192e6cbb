"""``addspan`` command line: gen, build, verify, sweep, plot.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from pathlib import Path

import numpy as np

from .completion import write_log
from .estimators import LIGHT, NEEDS_EPS, PAIRWISE, make_estimator
from .generators import generate, parse_weight_dist, random_pairs
from .graph import DemandSet, EdgeSubset, GraphError, load_graph, load_pairs, save_graph, save_pairs
from .paths import ErrorSpec, build_oracle
from .verify import size_scaling_fit, verify

OK, VIOLATION, USAGE = 0, 1, 2

SWEEP_COLUMNS = ("n", "trial", "seed", "algo", "eps", "edges", "weight", "lightness", "violations", "wall_ms")
DEFAULT_P = 0.5


class UsageError(Exception):
    pass


def manifest(args) -> str:
    items = {k: v for k, v in sorted(vars(args).items()) if k != "func" and v is not None}
    return "run: " + " ".join(f"{k}={v}" for k, v in items.items())


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key = {"pstar": "p_star", "k": "k_missing_cap"}.get(key, key)
        out[key] = float(val) if key == "C" else int(val)
    return out


def _estimator(args):
    if args.algo in NEEDS_EPS and args.eps is None:
        raise UsageError(f"--eps is required for {args.algo}")
    params = _parse_overrides(args.param)
    params["seed"] = args.seed
    if args.algo in NEEDS_EPS:
        params["eps"] = args.eps
    try:
        return make_estimator(args.algo, **params)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def spec_for(algo: str, eps: float | None) -> ErrorSpec:
    c = {"2eps": 2, "6eps": 6, "2w": 2, "4w": 4, "allpairs4w": 4, "epslight": 0, "4epslight": 4}[algo]
    return ErrorSpec(c, eps if algo in NEEDS_EPS else 0.0)


def _read_graph(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return load_graph(fh)
    except OSError as exc:
        raise UsageError(f"cannot read graph {path}: {exc.strerror}") from None


def _read_pairs(path, n):
    try:
        with open(path, encoding="utf-8") as fh:
            return load_pairs(fh, n)
    except OSError as exc:
        raise UsageError(f"cannot read pairs {path}: {exc.strerror}") from None


def _gen_params(args, n=None) -> tuple[str, dict]:
    if args.model == "grid":
        if args.rows is None or args.cols is None:
            raise UsageError("grid needs --rows and --cols")
        return "grid", {"rows": args.rows, "cols": args.cols}
    n = n if n is not None else args.n
    if n is None:
        raise UsageError(f"{args.model} needs --n")
    if args.model == "gnp":
        return "gnp", {"n": n, "p": args.p if args.p is not None else DEFAULT_P}
    return args.model, {"n": n}


# commands

def cmd_gen(args) -> int:
    model, params = _gen_params(args)
    G = generate(model, params, args.weights, args.seed)
    save_graph(G, args.out or sys.stdout, comments=[manifest(args)])
    if args.num_pairs:
        if not args.pairs_out:
            raise UsageError("--num-pairs needs --pairs-out")
        save_pairs(random_pairs(G.n, args.num_pairs, args.seed), args.pairs_out)
    return OK


def cmd_build(args) -> int:
    G = _read_graph(args.graph)
    est = _estimator(args)
    P = None
    if args.algo in PAIRWISE:
        if not args.pairs:
            raise UsageError(f"{args.algo} needs --pairs")
        P = _read_pairs(args.pairs, G.n)
    est.fit(G, pairs=P)
    rep = est.verify()
    header = [manifest(args)]
    if args.out:
        save_graph(est.transform(), args.out, comments=header)
    if args.log:
        write_log(est.log_, args.log, comments=header)
    if args.report:
        rep.to_csv(args.report, comments=header)
    print(rep.summary())
    return OK if rep.ok else VIOLATION


def cmd_verify(args) -> int:
    G = _read_graph(args.graph)
    S = _read_graph(args.spanner)
    index = G.edge_index()
    try:
        ids = [index[(min(u, v), max(u, v))] for u, v, _ in S.edges()]
    except KeyError as exc:
        raise UsageError(f"spanner edge {exc.args[0]} is not in the graph") from None
    P = _read_pairs(args.pairs, G.n) if args.pairs else None
    if args.algo is None:
        raise UsageError("verify needs --algo to pick the error bound")
    if args.algo in NEEDS_EPS and args.eps is None:
        raise UsageError(f"--eps is required for {args.algo}")
    if args.algo in PAIRWISE and P is None:
        raise UsageError(f"{args.algo} needs --pairs")
    rep = verify(G, EdgeSubset(G, ids), P, spec_for(args.algo, args.eps),
                 oracle=build_oracle(G, args.seed), tol=args.tol)
    if args.report:
        rep.to_csv(args.report, comments=[manifest(args)])
    print(rep.summary())
    return OK if rep.ok else VIOLATION


def trial_seed(seed: int, n: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, n, trial]).generate_state(1)[0])


def num_pairs(n: int, scale: float, power: float) -> int:
    return max(1, min(n * (n - 1) // 2, int(round(scale * n ** power))))


def run_trial(args, n: int, trial: int) -> dict:
    seed = trial_seed(args.seed, n, trial)
    model, params = _gen_params(args, n)
    G = generate(model, params, args.weights, seed)
    P = None
    if args.algo in PAIRWISE:
        P = random_pairs(G.n, num_pairs(G.n, args.pairs_scale, args.pairs_power), seed)
    sub = argparse.Namespace(**{**vars(args), "seed": seed})
    est = _estimator(sub)
    t0 = time.perf_counter()
    est.fit(G, pairs=P)
    wall = (time.perf_counter() - t0) * 1000
    rep = est.verify()
    return {"n": G.n, "trial": trial, "seed": seed, "algo": args.algo,
            "eps": args.eps if args.algo in NEEDS_EPS else "",
            "edges": est.n_edges_, "weight": est.weight_, "lightness": est.lightness_,
            "violations": len(rep.violations), "wall_ms": round(wall, 3)}


def sweep_metric(algo: str) -> str:
    return "lightness" if algo in LIGHT else "edges"


def cmd_sweep(args) -> int:
    sizes = args.sizes
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise UsageError("--sizes must be a non-empty ascending list")
    rows = [run_trial(args, n, tr) for n in sizes for tr in range(args.trials)]
    buf = io.StringIO()
    buf.write(f"# {manifest(args)}\n")
    wr = csv.DictWriter(buf, SWEEP_COLUMNS, lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    metric = sweep_metric(args.algo)
    meds = []
    for n in sizes:
        sel = [r for r in rows if r["n"] == n]
        med = {k: float(np.median([r[k] for r in sel])) for k in ("edges", "weight", "lightness")}
        meds.append((n, med[metric]))
        print(f"n={n} median edges={med['edges']:g} weight={med['weight']:.6g} "
              f"lightness={med['lightness']:.6g}", file=sys.stderr)
    if len(meds) >= 3:
        slope, _ = size_scaling_fit(meds)
        print(f"slope of median {metric} vs n: {slope:.4f}", file=sys.stderr)
    bad = sum(r["violations"] for r in rows)
    if bad:
        print(f"{bad} violations", file=sys.stderr)
    return VIOLATION if bad else OK


def read_sweep(path) -> list[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise UsageError(f"{path} has no rows")
    rd = csv.DictReader(lines)
    if rd.fieldnames is None or not set(SWEEP_COLUMNS) <= set(rd.fieldnames):
        raise UsageError(f"{path} is not a sweep CSV")
    rows = []
    for i, r in enumerate(rd, start=2):
        try:
            rows.append({**r, "n": int(r["n"]), "edges": float(r["edges"]),
                         "weight": float(r["weight"]), "lightness": float(r["lightness"])})
        except (TypeError, ValueError):
            raise UsageError(f"{path}: malformed row {i}") from None
    if not rows:
        raise UsageError(f"{path} has no rows")
    return rows


def sweep_medians(rows, metric) -> list[tuple[int, float]]:
    sizes = sorted({r["n"] for r in rows})
    return [(n, float(np.median([r[metric] for r in rows if r["n"] == n]))) for n in sizes]


def cmd_plot(args) -> int:
    rows = read_sweep(args.csv)
    metric = args.metric or sweep_metric(rows[0]["algo"])
    pts = sweep_medians(rows, metric)
    if len(pts) < 3:
        raise UsageError("plot needs at least 3 distinct sizes")
    slope, intercept = size_scaling_fit(pts)

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # keep labels as SVG text so the slope annotation stays machine-readable
    plt.rcParams["svg.fonttype"] = "none"

    n = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(n, y, "o", label=f"median {metric}")
    ax.loglog(n, np.exp(intercept) * n ** slope, "-", label="least-squares fit")
    ax.set_xlabel("n")
    ax.set_ylabel(metric)
    ax.set_title(rows[0]["algo"])
    ax.text(0.05, 0.92, f"slope = {slope:.4f}", transform=ax.transAxes)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"slope = {slope:.4f}")
    return OK


def _sizes(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def _weights(text):
    try:
        parse_weight_dist(text)
    except (GraphError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="addspan", description="Additive spanners with local error.")
    sub = ap.add_subparsers(dest="command", required=True)
    algos = ["2eps", "6eps", "2w", "4w", "allpairs4w", "epslight", "4epslight"]

    def graph_opts(p):
        p.add_argument("--model", choices=["gnp", "grid", "complete"], default="gnp")
        p.add_argument("--p", type=float, help=f"edge probability for gnp (default {DEFAULT_P})")
        p.add_argument("--rows", type=int)
        p.add_argument("--cols", type=int)
        p.add_argument("--weights", type=_weights, default="uniform:1:10",
                       help="unit | uniform:a:b | exponential:lam")

    def algo_opts(p, required=True):
        p.add_argument("--algo", choices=algos, required=required)
        p.add_argument("--eps", type=float)
        p.add_argument("--param", action="append", metavar="KEY=VALUE",
                       help="override d, ell, pstar, rounds, C, k")

    g = sub.add_parser("gen", help="generate a graph (and optionally pairs)")
    graph_opts(g)
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--num-pairs", type=int)
    g.add_argument("--pairs-out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("build", help="build and verify a spanner")
    algo_opts(b)
    b.add_argument("--graph", required=True)
    b.add_argument("--pairs")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="spanner edge list")
    b.add_argument("--log", help="insertion log CSV")
    b.add_argument("--report", help="verification report CSV")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="audit an existing spanner file")
    algo_opts(v, required=False)
    v.add_argument("--graph", required=True)
    v.add_argument("--spanner", required=True)
    v.add_argument("--pairs")
    v.add_argument("--seed", type=int, default=0, help="token seed used when the spanner was built")
    v.add_argument("--tol", type=float, help="absolute slack (default: scaled 1e-9)")
    v.add_argument("--report")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="scaling sweep over sizes and trials")
    algo_opts(s)
    graph_opts(s)
    s.add_argument("--sizes", type=_sizes, required=True)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pairs-scale", type=float, default=2.0, help="|P| = scale * n^power")
    s.add_argument("--pairs-power", type=float, default=1.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("plot", help="log-log SVG of a sweep CSV")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--out", required=True)
    pl.add_argument("--metric", choices=["edges", "weight", "lightness"])
    pl.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"addspan: {exc}", file=sys.stderr)
        return USAGE
    except (GraphError, OSError) as exc:
        print(f"addspan: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
