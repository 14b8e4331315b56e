"""Perfect matching packing in bipartite graphs via integer max-flow.

The packing pipeline: find the largest k such that the graph contains a
k-regular spanning subgraph (binary search over a max-flow feasibility test),
extract that subgraph, and split it into k perfect matchings.  The union of
the matchings covers all but a leftover fraction of the edges; under the
degree and codegree hypotheses checked in uniformity.py the guaranteed k is
(1 - 3*eps^(1/3)) * m * p and the leftover is below 4*eps^(1/3) of the edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .graphs import BipartiteGraph


def _csr(G: BipartiteGraph) -> tuple[np.ndarray, np.ndarray]:
    arr = G.edge_array
    indptr = np.zeros(G.m + 1, dtype=np.int64)
    np.add.at(indptr, arr[:, 0] + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, arr[:, 1].astype(np.int64)


def _check_k(k: int, m: int) -> int:
    k = int(k)
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, {m}], got {k}")
    return k


def max_k_regular(G: BipartiteGraph, k: int) -> BipartiteGraph | None:
    """Return a k-regular spanning subgraph of G, or None if none exists.

    The subgraph is the saturated middle layer of an integer max-flow; it
    exists iff the flow value reaches k*m.  k=0 yields the empty subgraph.
    """
    k = _check_k(k, G.m)
    indptr, cols = _csr(G)
    flow, edge_used, _ = kernels.max_flow_bipartite(G.m, indptr, cols, k)
    if flow != k * G.m:
        return None
    sub = BipartiteGraph.from_packed(G.m, G._packed[edge_used])
    counts_a = np.bincount(G.edge_array[edge_used, 0], minlength=G.m)
    counts_b = np.bincount(G.edge_array[edge_used, 1], minlength=G.m)
    assert np.all(counts_a == k) and np.all(counts_b == k), "flow result not regular"
    return sub


def infeasible_cut(G: BipartiteGraph, k: int) -> tuple[set[int], set[int]]:
    """Witness for the absence of a k-regular spanning subgraph.

    Returns (X, Y) with X in A and Y in B such that
    e(X, Y) < k * (|X| + |Y| - m), certifying infeasibility via the min-cut
    structure of the flow network.  Raises ValueError when k is feasible.
    """
    k = _check_k(k, G.m)
    m = G.m
    indptr, cols = _csr(G)
    flow, _, reach = kernels.max_flow_bipartite(m, indptr, cols, k)
    if flow == k * m:
        raise ValueError(f"k={k} is feasible; no cut to exhibit")
    X = {a for a in range(m) if reach[1 + a]}
    Y = {b for b in range(m) if not reach[1 + m + b]}
    mat = G.matrix()
    exy = int(mat[np.ix_(sorted(X), sorted(Y))].sum()) if X and Y else 0
    assert k * (m - len(X)) + k * (m - len(Y)) + exy == flow < k * m
    return X, Y


def largest_k(G: BipartiteGraph) -> int:
    """Largest k admitting a k-regular spanning subgraph (monotone in k)."""
    indptr, cols = _csr(G)
    lo, hi = 0, G.min_degree()
    while lo < hi:
        mid = (lo + hi + 1) // 2
        flow, _, _ = kernels.max_flow_bipartite(G.m, indptr, cols, mid)
        if flow == mid * G.m:
            lo = mid
        else:
            hi = mid - 1
    return lo


def decompose_regular(R: BipartiteGraph) -> list[BipartiteGraph]:
    """Split a regular bipartite graph into perfect matchings.

    The degree k is inferred; irregular input is rejected with the violating
    vertex named.  Output matchings are pairwise disjoint with union R,
    re-checked on every call.
    """
    m = R.m
    arr = R.edge_array
    deg_a = np.bincount(arr[:, 0], minlength=m)
    deg_b = np.bincount(arr[:, 1], minlength=m)
    k = int(deg_a[0]) if m else 0
    for side, deg in (("A", deg_a), ("B", deg_b)):
        bad = np.nonzero(deg != k)[0]
        if bad.size:
            raise ValueError(
                f"not {k}-regular: vertex {side.lower()}{int(bad[0])} has degree "
                f"{int(deg[bad[0]])}"
            )
    if k == 0:
        return []
    indptr, cols = _csr(R)
    rounds = kernels.decompose_k_regular(m, indptr, cols, k)

    matchings = []
    seen = []
    for rnd in range(k):
        pairs = np.stack([np.arange(m, dtype=np.int64), rounds[rnd]], axis=1)
        M = BipartiteGraph(m, pairs)
        if M.num_edges != m or len(set(rounds[rnd].tolist())) != m:
            raise AssertionError(f"round {rnd} is not a perfect matching")
        matchings.append(M)
        seen.append(M._packed)
    merged = np.concatenate(seen)
    if np.unique(merged).size != merged.size:
        raise AssertionError("matchings are not pairwise disjoint")
    if not np.array_equal(np.sort(merged), R._packed):
        raise AssertionError("matchings do not cover the input exactly")
    return matchings


def analytic_k(m: int, eps: float, p: float) -> int:
    """Guaranteed packing size (1 - 3*eps^(1/3)) * m * p, floored at >= 0."""
    return max(0, math.floor((1.0 - 3.0 * eps ** (1.0 / 3.0)) * m * p))


@dataclass(frozen=True)
class MatchingPacking:
    """Result of pack_matchings: k matchings plus exact edge accounting."""

    m: int
    k: int
    analytic_k: int
    matchings: tuple
    leftover: frozenset
    num_edges: int

    @property
    def reached_analytic(self) -> bool:
        return self.k >= self.analytic_k

    @property
    def leftover_fraction(self) -> Fraction:
        if self.num_edges == 0:
            return Fraction(0)
        return Fraction(len(self.leftover), self.num_edges)


def pack_matchings(G: BipartiteGraph, eps: float, p: float) -> MatchingPacking:
    """Pack edge-disjoint perfect matchings covering most of G.

    Uses the largest feasible k; eps and p only set the analytic target the
    result is reported against.
    """
    k = min(largest_k(G), G.m)
    R = max_k_regular(G, k)
    matchings = decompose_regular(R)
    covered = set(R.edges())
    leftover = frozenset(e for e in G.edges() if tuple(e) not in covered)
    assert len(leftover) + k * G.m == G.num_edges
    return MatchingPacking(
        m=G.m,
        k=k,
        analytic_k=analytic_k(G.m, eps, p),
        matchings=tuple(matchings),
        leftover=leftover,
        num_edges=G.num_edges,
    )


def edge_distribution_check(
    G: BipartiteGraph, X, Y, eps: float, p: float
) -> bool | None:
    """Check e(X, Y) >= (1 - 3*eps^(1/3)) * |X| * |Y| * p.

    Returns None (not applicable) when |X| < 1/(eps*p) or |Y| < eps^(1/3)*m,
    the size floors below which the bound is not asserted.
    """
    X = sorted(set(X))
    Y = sorted(set(Y))
    if X and (X[0] < 0 or X[-1] >= G.m):
        raise ValueError("vertex out of range in X")
    if Y and (Y[0] < 0 or Y[-1] >= G.m):
        raise ValueError("vertex out of range in Y")
    if len(X) < 1.0 / (eps * p) or len(Y) < eps ** (1.0 / 3.0) * G.m:
        return None
    exy = int(G.matrix()[np.ix_(X, Y)].sum())
    return exy >= (1.0 - 3.0 * eps ** (1.0 / 3.0)) * len(X) * len(Y) * p


def empirical_bipartite_params(G: BipartiteGraph) -> tuple[float, float]:
    """Empirical (eps_hat, p_hat): density and worst relative degree deviation."""
    m = G.m
    p_hat = G.num_edges / (m * m)
    if p_hat == 0.0:
        return 1.0, 0.0
    mat = G.matrix()
    degs = np.concatenate([mat.sum(axis=1), mat.sum(axis=0)])
    eps_hat = float(np.abs(degs / (m * p_hat) - 1.0).max())
    return eps_hat, p_hat
