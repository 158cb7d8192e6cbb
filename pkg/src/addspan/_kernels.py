"""Compiled shortest-path kernels.

Keys are compared lexicographically: base length (with a relative tolerance
of ``rel_tol``), then the integer perturbation sum, then hop count. A vertex
whose key improves after it was settled is re-settled, so near-equal float
lengths cannot make the result depend on heap order.
"""
import heapq

import numpy as np
from numba import njit


@njit(cache=True)
def _better(nd, np_, nh, cd, cp, ch, rel_tol):
    """1 if (nd, np_, nh) beats the current key, 0 if not, 2 if base and perturbation both tie."""
    if cd == np.inf:
        return 1
    tol = rel_tol * max(1.0, abs(nd), abs(cd))
    if nd < cd - tol:
        return 1
    if nd > cd + tol:
        return 0
    if np_ < cp:
        return 1
    if np_ > cp:
        return 0
    return 2


@njit(cache=True)
def lex_sssp(indptr, adj_v, adj_e, w, tok, src, rel_tol):
    n = len(indptr) - 1
    dist = np.full(n, np.inf)
    pert = np.zeros(n, np.int64)
    hops = np.zeros(n, np.int64)
    pred = np.full(n, -1, np.int64)
    dist[src] = 0.0
    ties = 0
    heap = [(0.0, np.int64(0), np.int64(0), np.int64(src))]
    while len(heap) > 0:
        d, p, h, x = heapq.heappop(heap)
        if d != dist[x] or p != pert[x] or h != hops[x]:
            continue
        for k in range(indptr[x], indptr[x + 1]):
            y = adj_v[k]
            e = adj_e[k]
            if e == pred[x]:
                continue
            nd = d + w[e]
            np_ = p + tok[e]
            nh = h + 1
            r = _better(nd, np_, nh, dist[y], pert[y], hops[y], rel_tol)
            if r == 2:
                if e != pred[y]:
                    ties += 1
                r = 1 if nh < hops[y] else 0
            if r == 1:
                dist[y] = nd
                pert[y] = np_
                hops[y] = nh
                pred[y] = e
                heapq.heappush(heap, (nd, np_, nh, y))
    return dist, pred, hops, ties


@njit(cache=True)
def _tree_maxw(pred, hops, eu, ev, w, src):
    n = len(pred)
    order = np.argsort(hops, kind="mergesort")
    maxw = np.zeros(n)
    for i in range(n):
        y = order[i]
        e = pred[y]
        if y == src or e < 0:
            continue
        x = eu[e] if ev[e] == y else ev[e]
        maxw[y] = max(maxw[x], w[e])
    return maxw


@njit(cache=True)
def lex_apsp(indptr, adj_v, adj_e, eu, ev, w, tok, rel_tol):
    """All-sources canonical trees: (dist, pred edge, max edge weight, tie count)."""
    n = len(indptr) - 1
    dist = np.empty((n, n))
    pred = np.empty((n, n), np.int64)
    maxw = np.empty((n, n))
    ties = 0
    for s in range(n):
        d, pr, hp, t = lex_sssp(indptr, adj_v, adj_e, w, tok, s, rel_tol)
        dist[s] = d
        pred[s] = pr
        maxw[s] = _tree_maxw(pr, hp, eu, ev, w, s)
        ties += t
    return dist, pred, maxw, ties


@njit(cache=True)
def layered_sssp(indptr, adj_v, adj_e, w, tok, in_h, src, k, rel_tol):
    """Lexicographic Dijkstra over states (vertex, edges used outside H <= k)."""
    n = len(indptr) - 1
    L = k + 1
    ns = n * L
    dist = np.full(ns, np.inf)
    pert = np.zeros(ns, np.int64)
    hops = np.zeros(ns, np.int64)
    pred_e = np.full(ns, -1, np.int64)
    pred_s = np.full(ns, -1, np.int64)
    s0 = src * L
    dist[s0] = 0.0
    heap = [(0.0, np.int64(0), np.int64(0), np.int64(s0))]
    while len(heap) > 0:
        d, p, h, st = heapq.heappop(heap)
        if d != dist[st] or p != pert[st] or h != hops[st]:
            continue
        x = st // L
        j = st % L
        for q in range(indptr[x], indptr[x + 1]):
            e = adj_e[q]
            jj = j if in_h[e] else j + 1
            if jj > k:
                continue
            y = adj_v[q] * L + jj
            nd = d + w[e]
            np_ = p + tok[e]
            nh = h + 1
            r = _better(nd, np_, nh, dist[y], pert[y], hops[y], rel_tol)
            if r == 1 or (r == 2 and nh < hops[y]):
                dist[y] = nd
                pert[y] = np_
                hops[y] = nh
                pred_e[y] = e
                pred_s[y] = st
                heapq.heappush(heap, (nd, np_, nh, y))
    return dist, pert, hops, pred_e, pred_s


@njit(cache=True)
def best_layer(dist, pert, hops, v, k, rel_tol):
    L = k + 1
    best = -1
    for j in range(L):
        st = v * L + j
        if dist[st] == np.inf:
            continue
        if best < 0:
            best = st
            continue
        r = _better(dist[st], pert[st], hops[st], dist[best], pert[best], hops[best], rel_tol)
        if r == 1 or (r == 2 and hops[st] < hops[best]):
            best = st
    return best


@njit(cache=True)
def mark_layered_paths(dist, pert, hops, pred_e, pred_s, targets, k, rel_tol, mask):
    """Set ``mask`` for every edge on the best layered path to each target; returns reached count."""
    reached = 0
    for i in range(len(targets)):
        st = best_layer(dist, pert, hops, targets[i], k, rel_tol)
        if st < 0:
            continue
        reached += 1
        while pred_e[st] >= 0:
            mask[pred_e[st]] = True
            st = pred_s[st]
    return reached


@njit(cache=True)
def relax_edge(D, u, v, wt):
    """Update an all-pairs matrix in place after inserting undirected edge (u, v, wt)."""
    n = D.shape[0]
    du = D[u].copy()
    dv = D[v].copy()
    for i in range(n):
        a = du[i] + wt
        b = dv[i] + wt
        if a >= D[i, v] and b >= D[i, u]:
            continue
        row = D[i]
        for j in range(n):
            x = a + dv[j]
            y = b + du[j]
            if y < x:
                x = y
            if x < row[j]:
                row[j] = x
