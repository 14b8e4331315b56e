"""Graph data model: 3-uniform hypergraphs, digraphs, bipartite graphs.

All three types are immutable and store their edges as sorted arrays of
packed 64-bit integers, which keeps multi-million edge instances compact and
makes membership queries vectorizable.  Edge iteration is always in
lexicographic order, so any output derived from iteration is deterministic.

Edge-list files start with a header line ``format=<kind> n=<int>`` where kind
is one of ``3graph``, ``digraph``, ``bipartite``.  Bipartite files carry an
extra header line ``m=<int>`` with the part size (n = 2m).  Blank lines and
lines starting with ``#`` are ignored.  Edge lines hold whitespace-separated
vertex ids: ``u v w`` with u < v < w, ``u v`` for an arc u -> v, or ``a b``
with both endpoints in 0..m-1 for a bipartite edge.
"""

from __future__ import annotations

import io
import os
from typing import Iterable, Iterator, Sequence

import numpy as np

# Adjacency matrices are cached only below this vertex count (bool n*n bytes).
_MATRIX_CACHE_LIMIT = 6000


class EdgeListError(ValueError):
    """Raised for malformed edge-list files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _check_vertex(v: int, n: int) -> int:
    v = int(v)
    if not 0 <= v < n:
        raise ValueError(f"vertex {v} out of range [0, {n})")
    return v


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Hypergraph3:
    """Immutable 3-uniform hypergraph on vertices 0..n-1.

    Edges are stored canonically as sorted triples; construction rejects
    out-of-range vertices, repeated vertices inside a triple, and duplicate
    triples.
    """

    __slots__ = ("n", "_packed", "_matrix")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 3:
            raise ValueError(f"need n >= 3, got {n}")
        self.n = int(n)
        rows = np.asarray(list(edges), dtype=np.int64).reshape(-1, 3)
        if rows.size:
            if rows.min() < 0 or rows.max() >= n:
                raise ValueError("vertex out of range")
            rows = np.sort(rows, axis=1)
            if not np.all((rows[:, 0] < rows[:, 1]) & (rows[:, 1] < rows[:, 2])):
                raise ValueError("triple with repeated vertex")
        un = np.uint64(n)
        packed = (rows[:, 0].astype(np.uint64) * un + rows[:, 1].astype(np.uint64)) * un + rows[
            :, 2
        ].astype(np.uint64)
        packed = np.sort(packed)
        if packed.size and np.any(packed[1:] == packed[:-1]):
            raise ValueError("duplicate triple")
        self._packed = _freeze(packed)
        self._matrix = None

    @classmethod
    def from_packed(cls, n: int, packed: np.ndarray) -> "Hypergraph3":
        """Trusted fast path: ``packed`` must be sorted, unique, in range."""
        g = cls.__new__(cls)
        g.n = int(n)
        g._packed = _freeze(np.asarray(packed, dtype=np.uint64))
        g._matrix = None
        return g

    @classmethod
    def complete(cls, n: int) -> "Hypergraph3":
        vv, ww = np.triu_indices(n, 1)
        chunks = []
        un = np.uint64(n)
        for u in range(n - 2):
            sel = vv > u
            chunks.append(
                (np.uint64(u) * un + vv[sel].astype(np.uint64)) * un
                + ww[sel].astype(np.uint64)
            )
        packed = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.uint64)
        return cls.from_packed(n, packed)

    @property
    def num_edges(self) -> int:
        return int(self._packed.size)

    @property
    def edge_array(self) -> np.ndarray:
        """Edges as an (E, 3) int64 array in lexicographic order."""
        n = np.uint64(self.n)
        w = self._packed % n
        rest = self._packed // n
        v = rest % n
        u = rest // n
        return np.stack([u, v, w], axis=1).astype(np.int64)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for u, v, w in self.edge_array:
            yield (int(u), int(v), int(w))

    def has_triples(self, triples: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (k, 3) array; unsorted rows allowed."""
        t = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        if t.size and (t.min() < 0 or t.max() >= self.n):
            raise ValueError("vertex out of range")
        if self._packed.size == 0:
            return np.zeros(t.shape[0], dtype=bool)
        s = np.sort(t, axis=1)
        distinct = (s[:, 0] < s[:, 1]) & (s[:, 1] < s[:, 2])
        un = np.uint64(self.n)
        packed = (s[:, 0].astype(np.uint64) * un + s[:, 1].astype(np.uint64)) * un + s[
            :, 2
        ].astype(np.uint64)
        idx = np.minimum(np.searchsorted(self._packed, packed), self._packed.size - 1)
        return distinct & (self._packed[idx] == packed)

    def has_edge(self, u: int, v: int, w: int) -> bool:
        for x in (u, v, w):
            _check_vertex(x, self.n)
        return bool(self.has_triples(np.array([[u, v, w]]))[0])

    def pair_neighbor_mask(self, u: int, v: int) -> np.ndarray:
        """Boolean mask over x of membership of {u, v, x}."""
        _check_vertex(u, self.n)
        _check_vertex(v, self.n)
        x = np.arange(self.n, dtype=np.int64)
        t = np.empty((self.n, 3), dtype=np.int64)
        t[:, 0] = u
        t[:, 1] = v
        t[:, 2] = x
        return self.has_triples(t)

    def pair_degree(self, u: int, v: int) -> int:
        return int(self.pair_neighbor_mask(u, v).sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph3):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._packed, other._packed)

    def __repr__(self) -> str:
        return f"Hypergraph3(n={self.n}, edges={self.num_edges})"


class Digraph:
    """Immutable directed graph on vertices 0..n-1, no loops."""

    __slots__ = ("n", "_packed", "_matrix")

    def __init__(self, n: int, arcs: Iterable[Sequence[int]] = ()):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = int(n)
        rows = np.asarray(list(arcs), dtype=np.int64).reshape(-1, 2)
        if rows.size:
            if rows.min() < 0 or rows.max() >= n:
                raise ValueError("vertex out of range")
            if np.any(rows[:, 0] == rows[:, 1]):
                raise ValueError("loop arc")
        packed = np.sort(rows[:, 0].astype(np.uint64) * np.uint64(n) + rows[:, 1].astype(np.uint64))
        if packed.size and np.any(packed[1:] == packed[:-1]):
            raise ValueError("duplicate arc")
        self._packed = _freeze(packed)
        self._matrix = None

    @classmethod
    def from_packed(cls, n: int, packed: np.ndarray) -> "Digraph":
        g = cls.__new__(cls)
        g.n = int(n)
        g._packed = _freeze(np.asarray(packed, dtype=np.uint64))
        g._matrix = None
        return g

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "Digraph":
        mat = np.asarray(mat, dtype=bool)
        n = mat.shape[0]
        u, v = np.nonzero(mat)
        packed = u.astype(np.uint64) * np.uint64(n) + v.astype(np.uint64)
        g = cls.from_packed(n, packed)
        g._matrix = _freeze(mat.copy())
        return g

    @classmethod
    def complete(cls, n: int) -> "Digraph":
        mat = np.ones((n, n), dtype=bool)
        np.fill_diagonal(mat, False)
        return cls.from_matrix(mat)

    @property
    def num_arcs(self) -> int:
        return int(self._packed.size)

    @property
    def arc_array(self) -> np.ndarray:
        n = np.uint64(self.n)
        return np.stack([self._packed // n, self._packed % n], axis=1).astype(np.int64)

    def arcs(self) -> Iterator[tuple[int, int]]:
        for u, v in self.arc_array:
            yield (int(u), int(v))

    def matrix(self) -> np.ndarray:
        """Boolean adjacency matrix, cached (mat[u, v] iff arc u -> v)."""
        if self._matrix is None:
            if self.n > _MATRIX_CACHE_LIMIT:
                raise MemoryError(
                    f"adjacency matrix disabled above n={_MATRIX_CACHE_LIMIT}"
                )
            mat = np.zeros((self.n, self.n), dtype=bool)
            arr = self.arc_array
            mat[arr[:, 0], arr[:, 1]] = True
            self._matrix = _freeze(mat)
        return self._matrix

    def has_arcs(self, arcs: np.ndarray) -> np.ndarray:
        a = np.asarray(arcs, dtype=np.int64).reshape(-1, 2)
        if a.size and (a.min() < 0 or a.max() >= self.n):
            raise ValueError("vertex out of range")
        if self._packed.size == 0:
            return np.zeros(a.shape[0], dtype=bool)
        packed = a[:, 0].astype(np.uint64) * np.uint64(self.n) + a[:, 1].astype(np.uint64)
        idx = np.minimum(np.searchsorted(self._packed, packed), self._packed.size - 1)
        return (self._packed[idx] == packed) & (a[:, 0] != a[:, 1])

    def has_arc(self, u: int, v: int) -> bool:
        _check_vertex(u, self.n)
        _check_vertex(v, self.n)
        if u == v:
            return False
        return bool(self.has_arcs(np.array([[u, v]]))[0])

    def out_degree(self, v: int) -> int:
        _check_vertex(v, self.n)
        return int(self.matrix()[v].sum())

    def in_degree(self, v: int) -> int:
        _check_vertex(v, self.n)
        return int(self.matrix()[:, v].sum())

    def common_out(self, a: int, b: int) -> int:
        """Number of x with arcs a -> x and b -> x."""
        _check_vertex(a, self.n)
        _check_vertex(b, self.n)
        mat = self.matrix()
        return int((mat[a] & mat[b]).sum())

    def common_in(self, a: int, b: int) -> int:
        """Number of x with arcs x -> a and x -> b."""
        _check_vertex(a, self.n)
        _check_vertex(b, self.n)
        mat = self.matrix()
        return int((mat[:, a] & mat[:, b]).sum())

    def out_in(self, a: int, b: int) -> int:
        """Number of x with arcs a -> x and x -> b."""
        _check_vertex(a, self.n)
        _check_vertex(b, self.n)
        mat = self.matrix()
        return int((mat[a] & mat[:, b]).sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self._packed, other._packed)

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, arcs={self.num_arcs})"


class BipartiteGraph:
    """Immutable bipartite graph with parts A and B, both of size m.

    Vertices are addressed part-locally: a and b both run over 0..m-1.
    """

    __slots__ = ("m", "_packed", "_matrix")

    def __init__(self, m: int, edges: Iterable[Sequence[int]] = ()):
        if m < 1:
            raise ValueError(f"need m >= 1, got {m}")
        self.m = int(m)
        rows = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if rows.size and (rows.min() < 0 or rows.max() >= m):
            raise ValueError("vertex out of range")
        packed = np.sort(rows[:, 0].astype(np.uint64) * np.uint64(m) + rows[:, 1].astype(np.uint64))
        if packed.size and np.any(packed[1:] == packed[:-1]):
            raise ValueError("duplicate edge")
        self._packed = _freeze(packed)
        self._matrix = None

    @classmethod
    def from_packed(cls, m: int, packed: np.ndarray) -> "BipartiteGraph":
        g = cls.__new__(cls)
        g.m = int(m)
        g._packed = _freeze(np.asarray(packed, dtype=np.uint64))
        g._matrix = None
        return g

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "BipartiteGraph":
        mat = np.asarray(mat, dtype=bool)
        m = mat.shape[0]
        a, b = np.nonzero(mat)
        g = cls.from_packed(m, a.astype(np.uint64) * np.uint64(m) + b.astype(np.uint64))
        g._matrix = _freeze(mat.copy())
        return g

    @classmethod
    def complete(cls, m: int) -> "BipartiteGraph":
        return cls.from_matrix(np.ones((m, m), dtype=bool))

    @property
    def num_edges(self) -> int:
        return int(self._packed.size)

    @property
    def edge_array(self) -> np.ndarray:
        m = np.uint64(self.m)
        return np.stack([self._packed // m, self._packed % m], axis=1).astype(np.int64)

    def edges(self) -> Iterator[tuple[int, int]]:
        for a, b in self.edge_array:
            yield (int(a), int(b))

    def matrix(self) -> np.ndarray:
        """Boolean biadjacency matrix (mat[a, b] iff edge a-b), cached."""
        if self._matrix is None:
            mat = np.zeros((self.m, self.m), dtype=bool)
            arr = self.edge_array
            mat[arr[:, 0], arr[:, 1]] = True
            self._matrix = _freeze(mat)
        return self._matrix

    def has_edge(self, a: int, b: int) -> bool:
        _check_vertex(a, self.m)
        _check_vertex(b, self.m)
        return bool(self.matrix()[a, b])

    def degree_a(self, a: int) -> int:
        _check_vertex(a, self.m)
        return int(self.matrix()[a].sum())

    def degree_b(self, b: int) -> int:
        _check_vertex(b, self.m)
        return int(self.matrix()[:, b].sum())

    def codegree_a(self, a1: int, a2: int) -> int:
        """Common neighbourhood size of two A-vertices."""
        _check_vertex(a1, self.m)
        _check_vertex(a2, self.m)
        mat = self.matrix()
        return int((mat[a1] & mat[a2]).sum())

    def codegree_b(self, b1: int, b2: int) -> int:
        _check_vertex(b1, self.m)
        _check_vertex(b2, self.m)
        mat = self.matrix()
        return int((mat[:, b1] & mat[:, b2]).sum())

    def min_degree(self) -> int:
        mat = self.matrix()
        return int(min(mat.sum(axis=1).min(), mat.sum(axis=0).min())) if self.m else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return self.m == other.m and np.array_equal(self._packed, other._packed)

    def __repr__(self) -> str:
        return f"BipartiteGraph(m={self.m}, edges={self.num_edges})"


# ---------------------------------------------------------------------------
# Edge-list files


def _parse_header(tokens: dict[str, str], key: str, line: int) -> int:
    if key not in tokens:
        raise EdgeListError(f"header missing {key}=<int>", line)
    try:
        return int(tokens[key])
    except ValueError:
        raise EdgeListError(f"bad {key} value {tokens[key]!r}", line) from None


def save_graph(graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        write_graph(graph, fh)


def write_graph(graph, fh: io.TextIOBase) -> None:
    if isinstance(graph, Hypergraph3):
        fh.write(f"format=3graph n={graph.n}\n")
        for u, v, w in graph.edge_array:
            fh.write(f"{u} {v} {w}\n")
    elif isinstance(graph, Digraph):
        fh.write(f"format=digraph n={graph.n}\n")
        for u, v in graph.arc_array:
            fh.write(f"{u} {v}\n")
    elif isinstance(graph, BipartiteGraph):
        fh.write(f"format=bipartite n={2 * graph.m}\n")
        fh.write(f"m={graph.m}\n")
        for a, b in graph.edge_array:
            fh.write(f"{a} {b}\n")
    else:
        raise TypeError(f"cannot serialize {type(graph).__name__}")


def load_graph(path: str | os.PathLike):
    """Load a graph of any kind; the header decides the type."""
    with open(path, "r", encoding="ascii") as fh:
        return read_graph(fh)


def read_graph(fh: io.TextIOBase):
    lines = fh.read().splitlines()
    header_line = None
    body_start = 0
    for i, raw in enumerate(lines):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        header_line = i
        body_start = i + 1
        break
    if header_line is None:
        raise EdgeListError("empty file: missing format header")
    tokens = {}
    for tok in lines[header_line].split():
        if "=" not in tok:
            raise EdgeListError(f"bad header token {tok!r}", header_line + 1)
        k, _, v = tok.partition("=")
        tokens[k] = v
    kind = tokens.get("format")
    if kind not in ("3graph", "digraph", "bipartite"):
        raise EdgeListError(f"unknown format {kind!r}", header_line + 1)
    n = _parse_header(tokens, "n", header_line + 1)

    m = None
    if kind == "bipartite":
        for i in range(body_start, len(lines)):
            text = lines[i].strip()
            if not text or text.startswith("#"):
                continue
            if not text.startswith("m="):
                raise EdgeListError("bipartite file requires m=<int> header", i + 1)
            m = _parse_header({"m": text[2:]}, "m", i + 1)
            body_start = i + 1
            break
        if m is None:
            raise EdgeListError("bipartite file requires m=<int> header")
        if n != 2 * m:
            raise EdgeListError(f"inconsistent sizes: n={n} but m={m}")

    width = {"3graph": 3, "digraph": 2, "bipartite": 2}[kind]
    limit = m if kind == "bipartite" else n
    rows = []
    seen: set[tuple[int, ...]] = set()
    for i in range(body_start, len(lines)):
        text = lines[i].strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) != width:
            raise EdgeListError(
                f"expected {width} vertex ids, got {len(parts)}", i + 1
            )
        try:
            row = [int(t) for t in parts]
        except ValueError:
            raise EdgeListError(f"non-integer vertex id in {text!r}", i + 1) from None
        if min(row) < 0 or max(row) >= limit:
            raise EdgeListError(f"vertex out of range [0, {limit})", i + 1)
        if kind == "3graph":
            if len(set(row)) != 3:
                raise EdgeListError("triple with repeated vertex", i + 1)
            key = tuple(sorted(row))
        else:
            if kind == "digraph" and row[0] == row[1]:
                raise EdgeListError("loop arc", i + 1)
            key = tuple(row)
        if key in seen:
            raise EdgeListError("duplicate edge", i + 1)
        seen.add(key)
        rows.append(row)

    if kind == "3graph":
        return Hypergraph3(n, rows)
    if kind == "digraph":
        return Digraph(n, rows)
    return BipartiteGraph(m, rows)
