import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from addspan.graph import WeightedGraph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def connected_graphs(draw, min_n=2, max_n=12, integral=False, max_w=10.0):
    """Random tree plus extra edges; weights positive."""
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    edges = {(p, i + 1) for i, p in enumerate(parents)}
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for u, v in extra:
        if u != v:
            edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)
    if integral:
        ws = draw(st.lists(st.integers(1, int(max_w)), min_size=len(edges), max_size=len(edges)))
    else:
        ws = draw(st.lists(st.floats(0.05, max_w, allow_nan=False), min_size=len(edges), max_size=len(edges)))
    return WeightedGraph(n, [(u, v, float(w)) for (u, v), w in zip(edges, ws)])


def random_connected(rng, n, p=0.4, weights="uniform"):
    """Seeded helper for non-hypothesis loops."""
    while True:
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(len(iu)) < p
        u, v = iu[keep], ju[keep]
        if weights == "unit":
            w = np.ones(len(u))
        elif weights == "exponential":
            w = rng.exponential(1.0, len(u)) + 1e-3
        else:
            w = rng.uniform(1, 10, len(u))
        G = WeightedGraph(n, np.column_stack([u, v, w]) if len(u) else np.zeros((0, 3)))
        if G.is_connected():
            return G


@pytest.fixture
def triangle():
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)])


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, with the measured value."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in rep.nodeid or rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome, props.get("measured", "")))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, measured in sorted(lines):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}  {measured}")
