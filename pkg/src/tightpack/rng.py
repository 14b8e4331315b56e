"""Seeded randomness: substream derivation and random graph generators.

Every randomized operation in the package draws from a named substream of a
single 64-bit root seed (scheme v1):

    generator = PCG64(SeedSequence([seed, tag, *indices]))

where ``tag`` is one of the STREAM_* constants below and ``indices`` identify
the invocation (round number, copy number, ...).  The same seed therefore
reproduces every intermediate object bit for bit, and distinct invocations
never share a stream.

Random 3-uniform hypergraphs use a counter-based inclusion rule instead of a
sequential stream: a triple {u, v, w} with u < v < w is included iff

    mix64(packed(u, v, w) + key) / 2**64 < p

with ``key`` derived from the (seed, tag) substream and ``mix64`` the
SplitMix64 output permutation.  This makes membership a pure function of
(n, p, seed, triple), so the same graph can be materialized explicitly or
queried implicitly at sizes where the edge list would not fit in memory.
"""

from __future__ import annotations

import numpy as np

from .graphs import BipartiteGraph, Digraph, Hypergraph3

MAX_SEED = 2**64 - 1

STREAM_3GRAPH = 1
STREAM_DIGRAPH = 2
STREAM_BIPARTITE = 3
STREAM_SPLIT = 4
STREAM_SPLIT_LABELS = 5
STREAM_PAIRING = 6
STREAM_PAIRING_LABELS = 7
STREAM_SITES = 8
STREAM_PACK_DIGRAPH = 9
STREAM_PACK_3GRAPH = 10

_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an int, got {type(seed).__name__}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    return int(seed)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for one named substream of ``seed``."""
    check_seed(seed)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *path])))


def stream_key(seed: int, *path: int) -> np.uint64:
    """Derive the 64-bit key for a counter-based substream."""
    return substream(seed, *path).integers(0, MAX_SEED, dtype=np.uint64, endpoint=True)


def mix64(x: np.ndarray) -> np.ndarray:
    """SplitMix64 output permutation, vectorized over uint64 arrays."""
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


def _uniform01(key: np.uint64, packed: np.ndarray) -> np.ndarray:
    bits = mix64(packed.astype(np.uint64) + key)
    return (bits >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


class TripleOracle:
    """Implicit random 3-graph: membership queries without an edge list.

    Answers exactly the same queries as ``random_3graph(n, p, seed)`` but in
    O(1) memory, for scales where the explicit edge list is too large.
    """

    def __init__(self, n: int, p: float, seed: int):
        if n < 3:
            raise ValueError(f"need n >= 3, got {n}")
        self.n = int(n)
        self.p = _check_p(p)
        self.seed = check_seed(seed)
        self._key = stream_key(seed, STREAM_3GRAPH)

    def has_triples(self, triples: np.ndarray) -> np.ndarray:
        """Vectorized membership for an array of shape (k, 3).

        Rows need not be sorted; rows with repeated vertices are never edges.
        """
        t = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= self.n):
            raise ValueError("vertex out of range")
        s = np.sort(t, axis=1)
        distinct = (s[:, 0] < s[:, 1]) & (s[:, 1] < s[:, 2])
        n = np.uint64(self.n)
        packed = (s[:, 0].astype(np.uint64) * n + s[:, 1].astype(np.uint64)) * n + s[
            :, 2
        ].astype(np.uint64)
        return distinct & (_uniform01(self._key, packed) < self.p)

    def has_edge(self, u: int, v: int, w: int) -> bool:
        return bool(self.has_triples(np.array([[u, v, w]]))[0])


def random_3graph(n: int, p: float, seed: int) -> Hypergraph3:
    """Sample a 3-uniform hypergraph with each triple included with probability p.

    Inclusion is decided by the counter-based rule shared with TripleOracle,
    so random_3graph(n, p, seed).has_edge agrees with
    TripleOracle(n, p, seed).has_edge on every triple.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    p = _check_p(p)
    key = stream_key(seed, STREAM_3GRAPH)
    vv, ww = np.triu_indices(n, 1)
    vv = vv.astype(np.uint64)
    ww = ww.astype(np.uint64)
    un = np.uint64(n)
    kept = []
    for u in range(n - 2):
        sel = vv > u
        packed = (np.uint64(u) * un + vv[sel]) * un + ww[sel]
        kept.append(packed[_uniform01(key, packed) < p])
    packed = np.concatenate(kept) if kept else np.empty(0, dtype=np.uint64)
    return Hypergraph3.from_packed(n, packed)


def random_digraph(n: int, p: float, seed: int) -> Digraph:
    """Sample a digraph with each ordered arc included with probability p."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    p = _check_p(p)
    rng = substream(seed, STREAM_DIGRAPH)
    mat = rng.random((n, n)) < p
    np.fill_diagonal(mat, False)
    return Digraph.from_matrix(mat)


def random_bipartite(m: int, p: float, seed: int) -> BipartiteGraph:
    """Sample a bipartite graph with parts of size m and edge probability p."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    p = _check_p(p)
    rng = substream(seed, STREAM_BIPARTITE)
    return BipartiteGraph.from_matrix(rng.random((m, m)) < p)
