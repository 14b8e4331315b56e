"""Pure Python kernels: max-flow, matching decomposition, schedule scan.

This module mirrors _fastkernels.pyx statement for statement.  Both backends
must produce bit-identical outputs: traversal orders are fixed by the CSR
input order and the arithmetic avoids fused operations.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def max_flow_bipartite(m, indptr, cols, k):
    """Dinic max-flow for the k-regular spanning subgraph network.

    Nodes: 0 = source, 1..m = part A, m+1..2m = part B, 2m+1 = sink.
    Arcs: source->a with capacity k, one unit arc per bipartite edge in CSR
    order, b->sink with capacity k.

    Returns (flow_value, edge_used, reach): edge_used marks saturated edge
    arcs (the extracted subgraph when flow == k*m), reach marks nodes
    reachable from the source in the final residual network (a minimum cut
    witness when the flow falls short).
    """
    indptr = list(indptr)
    cols = list(cols)
    num_edges = len(cols)
    num_nodes = 2 * m + 2
    source = 0
    sink = 2 * m + 1

    num_arcs = 2 * (m + num_edges + m)
    to = [0] * num_arcs
    cap = [0] * num_arcs
    nxt = [-1] * num_arcs
    head = [-1] * num_nodes
    idx = 0

    def add(u, v, c):
        nonlocal idx
        to[idx] = v
        cap[idx] = c
        nxt[idx] = head[u]
        head[u] = idx
        idx += 1
        to[idx] = u
        cap[idx] = 0
        nxt[idx] = head[v]
        head[v] = idx
        idx += 1

    for a in range(m):
        add(source, 1 + a, k)
    for a in range(m):
        for e in range(indptr[a], indptr[a + 1]):
            add(1 + a, 1 + m + cols[e], 1)
    for b in range(m):
        add(1 + m + b, sink, k)

    level = [-1] * num_nodes
    it = [0] * num_nodes
    queue = [0] * num_nodes

    def bfs():
        for i in range(num_nodes):
            level[i] = -1
        level[source] = 0
        queue[0] = source
        qlen = 1
        qpos = 0
        while qpos < qlen:
            u = queue[qpos]
            qpos += 1
            e = head[u]
            while e != -1:
                v = to[e]
                if cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue[qlen] = v
                    qlen += 1
                e = nxt[e]
        return level[sink] >= 0

    def dfs(u, limit):
        if u == sink:
            return limit
        pushed = 0
        e = it[u]
        while e != -1:
            v = to[e]
            if cap[e] > 0 and level[v] == level[u] + 1:
                got = dfs(v, min(limit - pushed, cap[e]))
                if got > 0:
                    cap[e] -= got
                    cap[e ^ 1] += got
                    pushed += got
                    if pushed == limit:
                        it[u] = e
                        return pushed
            e = nxt[e]
            it[u] = e
        return pushed

    flow = 0
    while bfs():
        for i in range(num_nodes):
            it[i] = head[i]
        flow += dfs(source, k * m + 1)

    # Final residual reachability from the source (min-cut witness).
    reach = [False] * num_nodes
    reach[source] = True
    queue[0] = source
    qlen = 1
    qpos = 0
    while qpos < qlen:
        u = queue[qpos]
        qpos += 1
        e = head[u]
        while e != -1:
            v = to[e]
            if cap[e] > 0 and not reach[v]:
                reach[v] = True
                queue[qlen] = v
                qlen += 1
            e = nxt[e]

    edge_used = np.zeros(num_edges, dtype=bool)
    for e in range(num_edges):
        # Edge e was inserted as arc pair 2*(m+e), 2*(m+e)+1.
        edge_used[e] = cap[2 * (m + e)] == 0
    return flow, edge_used, np.array(reach)


def decompose_k_regular(m, indptr, cols, k):
    """Split a k-regular bipartite CSR graph into k perfect matchings.

    Matchings are extracted one at a time with greedy seeding plus Kuhn
    augmentation, scanning vertices and edges in ascending order.  Returns a
    (k, m) array giving each round's matched B-vertex per A-vertex.  Raises
    ValueError if some round has no perfect matching (input not k-regular).
    """
    indptr = list(indptr)
    cols = list(cols)
    num_edges = len(cols)
    erow = [0] * num_edges
    for a in range(m):
        for e in range(indptr[a], indptr[a + 1]):
            erow[e] = a

    alive = [True] * num_edges
    match_edge_a = [-1] * m
    match_b = [-1] * m
    pred_edge = [-1] * m
    visit_stamp = [-1] * m
    ptr = [0] * m
    stack = [0] * (m + 1)
    out = np.empty((k, m), dtype=np.int64)

    for rnd in range(k):
        for a in range(m):
            match_edge_a[a] = -1
            match_b[a] = -1
        # Greedy pass.
        for a in range(m):
            for e in range(indptr[a], indptr[a + 1]):
                if alive[e] and match_b[cols[e]] < 0:
                    match_edge_a[a] = e
                    match_b[cols[e]] = a
                    break
        # Augment the leftovers.
        for a0 in range(m):
            if match_edge_a[a0] >= 0:
                continue
            stamp = rnd * m + a0
            stack[0] = a0
            ptr[a0] = indptr[a0]
            depth = 1
            augmented = False
            while depth > 0 and not augmented:
                a = stack[depth - 1]
                progressed = False
                while ptr[a] < indptr[a + 1]:
                    e = ptr[a]
                    ptr[a] += 1
                    if not alive[e]:
                        continue
                    b = cols[e]
                    if visit_stamp[b] == stamp:
                        continue
                    visit_stamp[b] = stamp
                    pred_edge[b] = e
                    owner = match_b[b]
                    if owner < 0:
                        while True:
                            e2 = pred_edge[b]
                            a2 = erow[e2]
                            old = match_edge_a[a2]
                            match_edge_a[a2] = e2
                            match_b[b] = a2
                            if old < 0:
                                break
                            b = cols[old]
                        augmented = True
                        break
                    ptr[owner] = indptr[owner]
                    stack[depth] = owner
                    depth += 1
                    progressed = True
                    break
                if not progressed and not augmented:
                    depth -= 1
            if not augmented:
                raise ValueError(
                    f"no perfect matching in round {rnd}: vertex {a0} exhausted"
                )
        for a in range(m):
            e = match_edge_a[a]
            alive[e] = False
            out[rnd, a] = cols[e]
    return out


def schedule_scan(eps0, p0, drift, denom, p_stop, max_steps):
    """Iterate eps <- eps*(1 + drift*eps^2/denom), p <- p*(1 - eps^2/denom)
    until p <= p_stop; return (T, eps_prev, p_prev, eps_T, p_T).

    T is the first index with p_T <= p_stop; eps_prev/p_prev are the values
    at T-1 (NaN when T == 0).  Raises RuntimeError past max_steps.
    """
    t = 0
    e = eps0
    p = p0
    ep = float("nan")
    pp = float("nan")
    while p > p_stop:
        if t >= max_steps:
            raise RuntimeError(f"schedule did not stop within {max_steps} steps")
        ep = e
        pp = p
        e = ep * (1.0 + drift * ep * ep / denom)
        p = pp * (1.0 - ep * ep / denom)
        t += 1
    return t, ep, pp, e, p
