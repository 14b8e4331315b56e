# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; the pure Python twin is _pykernels.py.

Outputs must stay bit-identical with the twin: same traversal orders, same
float expression shapes (compiled with -ffp-contract=off).
"""

import numpy as np

cimport cython
from libc.stdlib cimport free, malloc

BACKEND = "cython"


cdef struct FlowNet:
    int *to
    long long *cap
    int *nxt
    int *head
    int *level
    int *it
    int *queue
    int num_nodes


cdef inline void _add(FlowNet *net, int *idx, int u, int v, long long c) noexcept:
    cdef int i = idx[0]
    net.to[i] = v
    net.cap[i] = c
    net.nxt[i] = net.head[u]
    net.head[u] = i
    i += 1
    net.to[i] = u
    net.cap[i] = 0
    net.nxt[i] = net.head[v]
    net.head[v] = i
    idx[0] = i + 1


cdef bint _bfs(FlowNet *net, int source, int sink) noexcept:
    cdef int i, u, v, e, qlen, qpos
    for i in range(net.num_nodes):
        net.level[i] = -1
    net.level[source] = 0
    net.queue[0] = source
    qlen = 1
    qpos = 0
    while qpos < qlen:
        u = net.queue[qpos]
        qpos += 1
        e = net.head[u]
        while e != -1:
            v = net.to[e]
            if net.cap[e] > 0 and net.level[v] < 0:
                net.level[v] = net.level[u] + 1
                net.queue[qlen] = v
                qlen += 1
            e = net.nxt[e]
    return net.level[sink] >= 0


cdef long long _dfs(FlowNet *net, int u, int sink, long long limit) noexcept:
    if u == sink:
        return limit
    cdef long long pushed = 0, got, room
    cdef int v
    cdef int e = net.it[u]
    while e != -1:
        v = net.to[e]
        if net.cap[e] > 0 and net.level[v] == net.level[u] + 1:
            room = limit - pushed
            if net.cap[e] < room:
                room = net.cap[e]
            got = _dfs(net, v, sink, room)
            if got > 0:
                net.cap[e] -= got
                net.cap[e ^ 1] += got
                pushed += got
                if pushed == limit:
                    net.it[u] = e
                    return pushed
        e = net.nxt[e]
        net.it[u] = e
    return pushed


def max_flow_bipartite(int m, indptr_obj, cols_obj, int k):
    """See _pykernels.max_flow_bipartite."""
    cdef long[::1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef long[::1] cols = np.ascontiguousarray(cols_obj, dtype=np.int64)
    cdef int num_edges = cols.shape[0]
    cdef int num_nodes = 2 * m + 2
    cdef int source = 0
    cdef int sink = 2 * m + 1
    cdef int num_arcs = 2 * (m + num_edges + m)

    cdef FlowNet net
    net.num_nodes = num_nodes
    net.to = <int *> malloc(num_arcs * sizeof(int))
    net.cap = <long long *> malloc(num_arcs * sizeof(long long))
    net.nxt = <int *> malloc(num_arcs * sizeof(int))
    net.head = <int *> malloc(num_nodes * sizeof(int))
    net.level = <int *> malloc(num_nodes * sizeof(int))
    net.it = <int *> malloc(num_nodes * sizeof(int))
    net.queue = <int *> malloc(num_nodes * sizeof(int))
    if (net.to == NULL or net.cap == NULL or net.nxt == NULL or net.head == NULL
            or net.level == NULL or net.it == NULL or net.queue == NULL):
        raise MemoryError()

    cdef int idx = 0, a, b, e, u, v, i, qlen, qpos
    cdef long long flow = 0
    edge_used = np.zeros(num_edges, dtype=bool)
    reach_arr = np.zeros(num_nodes, dtype=bool)
    cdef unsigned char[::1] used_view = edge_used.view(np.uint8)
    cdef unsigned char[::1] reach_view = reach_arr.view(np.uint8)

    try:
        for i in range(num_nodes):
            net.head[i] = -1
        for a in range(m):
            _add(&net, &idx, source, 1 + a, k)
        for a in range(m):
            for e in range(indptr[a], indptr[a + 1]):
                _add(&net, &idx, 1 + a, 1 + m + <int> cols[e], 1)
        for b in range(m):
            _add(&net, &idx, 1 + m + b, sink, k)

        while _bfs(&net, source, sink):
            for i in range(num_nodes):
                net.it[i] = net.head[i]
            flow += _dfs(&net, source, sink, <long long> k * m + 1)

        reach_view[source] = True
        net.queue[0] = source
        qlen = 1
        qpos = 0
        while qpos < qlen:
            u = net.queue[qpos]
            qpos += 1
            e = net.head[u]
            while e != -1:
                v = net.to[e]
                if net.cap[e] > 0 and not reach_view[v]:
                    reach_view[v] = True
                    net.queue[qlen] = v
                    qlen += 1
                e = net.nxt[e]

        for e in range(num_edges):
            used_view[e] = net.cap[2 * (m + e)] == 0
    finally:
        free(net.to)
        free(net.cap)
        free(net.nxt)
        free(net.head)
        free(net.level)
        free(net.it)
        free(net.queue)
    return int(flow), edge_used, reach_arr


def decompose_k_regular(int m, indptr_obj, cols_obj, int k):
    """See _pykernels.decompose_k_regular."""
    cdef long[::1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef long[::1] cols = np.ascontiguousarray(cols_obj, dtype=np.int64)
    cdef int num_edges = cols.shape[0]
    out = np.empty((k, m), dtype=np.int64)
    cdef long[:, ::1] out_view = out
    cdef int *erow = <int *> malloc(num_edges * sizeof(int))
    cdef unsigned char *alive = <unsigned char *> malloc(num_edges * sizeof(unsigned char))
    cdef int *match_edge_a = <int *> malloc(m * sizeof(int))
    cdef int *match_b = <int *> malloc(m * sizeof(int))
    cdef int *pred_edge = <int *> malloc(m * sizeof(int))
    cdef long long *visit_stamp = <long long *> malloc(m * sizeof(long long))
    cdef long *ptr = <long *> malloc(m * sizeof(long))
    cdef int *stack = <int *> malloc((m + 1) * sizeof(int))
    if (erow == NULL or alive == NULL or match_edge_a == NULL or match_b == NULL
            or pred_edge == NULL or visit_stamp == NULL or ptr == NULL or stack == NULL):
        raise MemoryError()

    cdef int rnd, a, a0, a2, b, owner, depth, e2, failed_round = -1, failed_vertex = -1
    cdef long e, old
    cdef long long stamp
    cdef bint augmented, progressed

    try:
        for e in range(num_edges):
            alive[e] = True
        for a in range(m):
            visit_stamp[a] = -1
            for e in range(indptr[a], indptr[a + 1]):
                erow[e] = a

        for rnd in range(k):
            for a in range(m):
                match_edge_a[a] = -1
                match_b[a] = -1
            for a in range(m):
                for e in range(indptr[a], indptr[a + 1]):
                    if alive[e] and match_b[cols[e]] < 0:
                        match_edge_a[a] = <int> e
                        match_b[cols[e]] = a
                        break
            for a0 in range(m):
                if match_edge_a[a0] >= 0:
                    continue
                stamp = <long long> rnd * m + a0
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
                        b = <int> cols[e]
                        if visit_stamp[b] == stamp:
                            continue
                        visit_stamp[b] = stamp
                        pred_edge[b] = <int> e
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
                                b = <int> cols[old]
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
                    failed_round = rnd
                    failed_vertex = a0
                    break
            if failed_round >= 0:
                break
            for a in range(m):
                e = match_edge_a[a]
                alive[e] = False
                out_view[rnd, a] = cols[e]
    finally:
        free(erow)
        free(alive)
        free(match_edge_a)
        free(match_b)
        free(pred_edge)
        free(visit_stamp)
        free(ptr)
        free(stack)
    if failed_round >= 0:
        raise ValueError(
            f"no perfect matching in round {failed_round}: vertex {failed_vertex} exhausted"
        )
    return out


def schedule_scan(double eps0, double p0, double drift, double denom,
                  double p_stop, long long max_steps):
    """See _pykernels.schedule_scan."""
    cdef long long t = 0
    cdef double e = eps0
    cdef double p = p0
    cdef double ep = float("nan")
    cdef double pp = float("nan")
    while p > p_stop:
        if t >= max_steps:
            raise RuntimeError(f"schedule did not stop within {max_steps} steps")
        ep = e
        pp = p
        e = ep * (1.0 + drift * ep * ep / denom)
        p = pp * (1.0 - ep * ep / denom)
        t += 1
    return t, ep, pp, e, p
