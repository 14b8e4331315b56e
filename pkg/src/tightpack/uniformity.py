"""Uniformity verification for hypergraphs, digraphs, bipartite graphs.

A 3-graph is (eps, p)-uniform when, for every pattern in the catalog below
and every ordered tuple of distinct anchor vertices, the number of extension
vertices x completing all required triples is within (1 +- eps) of n * p^s,
s being the number of pattern edges.  Digraphs get the analogous degree,
codegree and four-path conditions; bipartite graphs a degree window plus a
codegree upper bound.

Checkers run exhaustively (refused above a site budget) or on sampled sites;
a sampled run whose requested site count reaches a family's full site count
clamps to exhaustive enumeration for that family, so full-coverage sampling
reproduces the exhaustive verdict exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .graphs import BipartiteGraph, Digraph, Hypergraph3
from .rng import STREAM_SITES, substream

DEFAULT_BUDGET = 10**8
DEFAULT_SITES = 10**4


class BudgetExceeded(RuntimeError):
    """Exhaustive verification refused: site count exceeds the budget."""


@dataclass(frozen=True)
class ExtensionPattern:
    """Anchor-pair pattern an extension vertex must complete.

    ``edges`` lists pairs (i, j) of anchor indices; vertex x extends an
    anchor tuple (v_0 .. v_{t-1}) when {v_i, v_j, x} is a hyperedge for every
    listed pair.  x must be distinct from all anchors, so an edgeless pattern
    counts n - t extensions.
    """

    name: str
    t: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not 1 <= self.t <= 7:
            raise ValueError(f"need 1 <= t <= 7, got {self.t}")
        if len(self.edges) > 6:
            raise ValueError(f"at most 6 pattern edges, got {len(self.edges)}")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < j < self.t):
                raise ValueError(f"bad pattern edge ({i}, {j}) for t={self.t}")
            if (i, j) in seen:
                raise ValueError(f"duplicate pattern edge ({i}, {j})")
            seen.add((i, j))

    @property
    def s(self) -> int:
        return len(self.edges)


SINGLE_EDGE = ExtensionPattern("single-edge", 2, ((0, 1),))
TWO_DISJOINT_EDGES = ExtensionPattern("two-disjoint-edges", 4, ((0, 1), (2, 3)))
CHERRY = ExtensionPattern("cherry", 3, ((0, 1), (1, 2)))
THREE_PATH = ExtensionPattern("three-path", 4, ((0, 1), (1, 2), (2, 3)))
# Two three-edge paths sharing their second vertex: anchors (0..6), paths
# 0-1-3-4 and 2-1-5-6 hinged at vertex 1.
DOUBLE_THREE_PATH = ExtensionPattern(
    "double-three-path", 7, ((0, 1), (1, 2), (1, 3), (1, 5), (3, 4), (5, 6))
)

CATALOG: tuple[ExtensionPattern, ...] = (
    SINGLE_EDGE,
    TWO_DISJOINT_EDGES,
    CHERRY,
    THREE_PATH,
    DOUBLE_THREE_PATH,
)


def full_catalog(t_max: int = 7, s_max: int = 6):
    """Every anchor-pair pattern with t <= t_max vertices, at most s_max edges.

    Yields all edge subsets without isomorphism reduction, so the sweep is
    huge (82k patterns at t=7 alone); intended for small test graphs via the
    catalog argument of check_3graph_uniform.
    """
    from itertools import combinations

    for t in range(1, t_max + 1):
        pair_pool = list(combinations(range(t), 2))
        for s in range(0, min(s_max, len(pair_pool)) + 1):
            for edges in combinations(pair_pool, s):
                tag = ".".join(f"{i}{j}" for i, j in edges) or "none"
                yield ExtensionPattern(f"t{t}:{tag}", t, edges)


def extension_count(H: Hypergraph3, pattern: ExtensionPattern, anchors) -> int:
    """Number of x outside ``anchors`` completing every pattern edge."""
    anchors = [int(a) for a in anchors]
    if len(anchors) != pattern.t:
        raise ValueError(f"expected {pattern.t} anchors, got {len(anchors)}")
    if len(set(anchors)) != pattern.t:
        raise ValueError("anchors must be distinct")
    for a in anchors:
        if not 0 <= a < H.n:
            raise ValueError(f"vertex {a} out of range")
    mask = np.ones(H.n, dtype=bool)
    mask[anchors] = False
    for i, j in pattern.edges:
        mask &= H.pair_neighbor_mask(anchors[i], anchors[j])
        if not mask.any():
            return 0
    return int(mask.sum())


def extension_counts_all(
    H: Hypergraph3, pattern: ExtensionPattern, budget: int = DEFAULT_BUDGET
) -> np.ndarray:
    """Counts for every ordered anchor tuple, as an int16 array of shape (n,)*t.

    Entries at tuples with repeated anchors are not meaningful.  This is the
    exhaustive checker's counting route: a dense membership tensor contracted
    over the extension vertex, independent of the per-site route used by
    extension_count.
    """
    n = H.n
    t = pattern.t
    if n**t > 1.5 * budget:
        raise BudgetExceeded(f"{n}^{t} sites is too large to materialize")
    if pattern.s == 0:
        return np.full((n,) * t, n - t, dtype=np.int16)
    T = _membership_tensor(H)
    letters = "abcdefg"[:t]
    ones = np.ones(n, dtype=np.float32)
    counts = _pattern_einsum(T, pattern, letters, "z", ones)
    for k in range(t):
        counts = counts - _pattern_einsum(T, pattern, letters, letters[k], ones)
    return np.rint(counts).astype(np.int16)


def _membership_tensor(H: Hypergraph3) -> np.ndarray:
    n = H.n
    T = np.zeros((n, n, n), dtype=np.float32)
    arr = H.edge_array
    for perm in permutations(range(3)):
        T[arr[:, perm[0]], arr[:, perm[1]], arr[:, perm[2]]] = 1.0
    return T


def _pattern_einsum(T, pattern, letters, xletter, ones) -> np.ndarray:
    subs = [letters[i] + letters[j] + xletter for i, j in pattern.edges]
    operands = [T] * len(subs)
    present = set("".join(subs))
    for ch in letters:
        if ch not in present:
            subs.append(ch)
            operands.append(ones)
    return np.einsum(",".join(subs) + "->" + letters, *operands, optimize=True)


def _distinct_mask(n: int, t: int) -> np.ndarray:
    idx = [
        np.arange(n).reshape((1,) * k + (n,) + (1,) * (t - 1 - k)) for k in range(t)
    ]
    mask = np.ones((n,) * t, dtype=bool)
    for i in range(t):
        for j in range(i + 1, t):
            mask &= idx[i] != idx[j]
    return mask


@dataclass
class UniformityReport:
    uniform: bool
    epsilon: float
    p: float
    worst_ratio: float
    witness: dict | None
    sites_tested: int
    mode: str
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "uniform": self.uniform,
                "epsilon": self.epsilon,
                "p": self.p,
                "worst_ratio": self.worst_ratio,
                "witness": self.witness,
                "sites_tested": self.sites_tested,
                "mode": self.mode,
            },
            sort_keys=True,
        )


class _Worst:
    """Tracks the largest deviation ratio and its witness site."""

    def __init__(self):
        self.ratio = -1.0
        self.witness = None
        self.sites = 0

    def update_masked(self, ratios: np.ndarray, mask, family: str, site_from_flat):
        """Fold in a (possibly masked) array of ratios.

        site_from_flat maps a flat index of ``ratios`` to the witness site.
        """
        if mask is not None:
            self.sites += int(mask.sum())
            ratios = np.where(mask, ratios, -1.0)
        else:
            self.sites += int(ratios.size)
        if ratios.size == 0:
            return
        flat = int(np.argmax(ratios))
        val = float(ratios.flat[flat])
        if val > self.ratio:
            self.ratio = val
            self.witness = {
                "family": family,
                "site": [int(v) for v in site_from_flat(flat)],
            }

    def report(self, eps: float, p: float, mode: str, **details) -> UniformityReport:
        ratio = max(self.ratio, 0.0)
        return UniformityReport(
            uniform=bool(ratio <= eps),
            epsilon=float(eps),
            p=float(p),
            worst_ratio=float(ratio),
            witness=self.witness,
            sites_tested=int(self.sites),
            mode=mode,
            details=dict(details),
        )


def _falling(n: int, t: int) -> int:
    out = 1
    for i in range(t):
        out *= n - i
    return out


def _check_eps_p(eps: float, p: float) -> tuple[float, float]:
    eps = float(eps)
    p = float(p)
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return eps, p


def _sample_distinct(rng, n: int, t: int, count: int) -> np.ndarray:
    """Uniform ordered tuples of t distinct vertices, by rejection."""
    if n < t:
        raise ValueError(f"cannot draw {t} distinct vertices from {n}")
    out = rng.integers(0, n, size=(count, t))
    while True:
        s = np.sort(out, axis=1)
        bad = (s[:, 1:] == s[:, :-1]).any(axis=1)
        if not bad.any():
            return out
        out[bad] = rng.integers(0, n, size=(int(bad.sum()), t))


def check_3graph_uniform(
    H: Hypergraph3,
    eps: float,
    p: float,
    mode: str = "auto",
    sites: int = DEFAULT_SITES,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    catalog: tuple[ExtensionPattern, ...] = CATALOG,
) -> UniformityReport:
    """Verify (eps, p)-uniformity of a 3-graph over the pattern catalog.

    mode: "exhaustive" visits every ordered distinct anchor tuple (refused
    above ``budget`` total sites), "sampled" draws ``sites`` tuples per
    pattern from substream(seed, ...), "auto" picks exhaustive iff it fits
    the budget.
    """
    eps, p = _check_eps_p(eps, p)
    n = H.n
    total = sum(_falling(n, pat.t) for pat in catalog)
    if mode == "auto":
        mode = "exhaustive" if total <= budget else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and total > budget:
        raise BudgetExceeded(
            f"exhaustive check needs {total} sites, budget is {budget}"
        )

    worst = _Worst()
    for pat_idx, pat in enumerate(catalog):
        target = n * p**pat.s
        family = f"pattern:{pat.name}"
        n_sites = _falling(n, pat.t)
        if n_sites == 0:
            # No way to place t distinct anchors; the pattern holds vacuously.
            continue
        if mode == "exhaustive" or sites >= n_sites:
            counts = extension_counts_all(H, pat, budget=budget)
            dmask = _distinct_mask(n, pat.t)
            ratios = np.abs(counts.astype(np.float32) / target - 1.0)
            shape = counts.shape
            worst.update_masked(
                ratios,
                dmask,
                family,
                lambda flat, sh=shape: np.unravel_index(flat, sh),
            )
        else:
            rng = substream(seed, STREAM_SITES, pat_idx)
            tuples = _sample_distinct(rng, n, pat.t, sites)
            vals = np.empty(sites, dtype=np.float64)
            for i in range(sites):
                vals[i] = extension_count(H, pat, tuples[i])
            ratios = np.abs(vals / target - 1.0)
            worst.update_masked(ratios, None, family, lambda flat, tp=tuples: tp[flat])
    return worst.report(eps, p, mode)


def check_digraph_uniform(
    D: Digraph,
    eps: float,
    p: float,
    mode: str = "auto",
    sites: int = DEFAULT_SITES,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> UniformityReport:
    """Verify (eps, p)-uniformity of a digraph.

    Conditions: (i) every in/out-degree within (1 +- eps) n p; (ii) for
    ordered pairs (a, b) of distinct vertices, common out-neighbours, common
    in-neighbours and out-of-a/in-to-b counts all within (1 +- eps) n p^2;
    (iii) for tuples (a, b, c, d) pairwise distinct except possibly b = c,
    the number of x with arcs a->x, x->b, c->x, x->d within (1 +- eps) n p^4.

    Degrees are always enumerated; pair and four-path sites honour the mode.
    """
    eps, p = _check_eps_p(eps, p)
    n = D.n
    pair_family = n * (n - 1)
    quad_sites = _falling(n, 4) + n * (n - 1) * (n - 2)
    total = 2 * n + 3 * pair_family + quad_sites
    if mode == "auto":
        mode = "exhaustive" if total <= budget else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exhaustive" and total > budget:
        raise BudgetExceeded(
            f"exhaustive check needs {total} sites, budget is {budget}"
        )

    M = D.matrix()
    Mf = M.astype(np.float32)
    worst = _Worst()

    worst.update_masked(
        np.abs(M.sum(axis=1) / (n * p) - 1.0), None, "out-degree", lambda i: (i,)
    )
    worst.update_masked(
        np.abs(M.sum(axis=0) / (n * p) - 1.0), None, "in-degree", lambda i: (i,)
    )

    target2 = n * p**2
    target4 = n * p**4
    if mode == "exhaustive" or sites >= pair_family:
        off = ~np.eye(n, dtype=bool)
        for name, mat in (
            ("common-out", Mf @ Mf.T),
            ("common-in", Mf.T @ Mf),
            ("out-to-in", Mf @ Mf),
        ):
            ratios = np.abs(mat / target2 - 1.0)
            worst.update_masked(
                ratios, off, name, lambda flat, nn=n: (flat // nn, flat % nn)
            )
    else:
        rng = substream(seed, STREAM_SITES, 100)
        pairs = _sample_distinct(rng, n, 2, sites)
        A, B = pairs[:, 0], pairs[:, 1]
        for name, vals in (
            ("common-out", (M[A] & M[B]).sum(axis=1)),
            ("common-in", (M[:, A] & M[:, B]).sum(axis=0)),
            ("out-to-in", (M[A] & M[:, B].T).sum(axis=1)),
        ):
            ratios = np.abs(vals / target2 - 1.0)
            worst.update_masked(ratios, None, name, lambda flat, pr=pairs: pr[flat])

    if mode == "exhaustive" or sites >= quad_sites:
        _quad_exhaustive(Mf, n, target4, worst)
    else:
        rng = substream(seed, STREAM_SITES, 101)
        half = sites // 2
        quads = np.empty((sites, 4), dtype=np.int64)
        quads[:half] = _sample_distinct(rng, n, 4, half)
        trip = _sample_distinct(rng, n, 3, sites - half)
        quads[half:, 0] = trip[:, 0]
        quads[half:, 1] = trip[:, 1]
        quads[half:, 2] = trip[:, 1]
        quads[half:, 3] = trip[:, 2]
        a, b, c, d = quads.T
        vals = (M[a] & M[:, b].T & M[c] & M[:, d].T).sum(axis=1)
        ratios = np.abs(vals / target4 - 1.0)
        worst.update_masked(ratios, None, "four-path", lambda flat, qd=quads: qd[flat])

    return worst.report(eps, p, mode)


def _quad_exhaustive(Mf: np.ndarray, n: int, target4: float, worst: _Worst) -> None:
    """All four-path counts, chunked over the first anchor a.

    counts[c, b*n + d] = number of x with a->x, x->b, c->x, x->d.
    """
    V = np.empty((n, n * n), dtype=np.float32)
    for b in range(n):
        V[:, b * n : (b + 1) * n] = Mf[:, b : b + 1] * Mf
    arangen = np.arange(n)
    b_of_col = np.repeat(arangen, n)
    d_of_col = np.tile(arangen, n)
    for a in range(n):
        counts = (Mf[a] * Mf) @ V
        valid = np.ones((n, n * n), dtype=bool)
        valid[a, :] = False
        valid[:, b_of_col == a] = False
        valid[:, d_of_col == a] = False
        valid[:, b_of_col == d_of_col] = False
        valid &= arangen[:, None] != d_of_col[None, :]
        ratios = np.abs(counts / target4 - 1.0)
        worst.update_masked(
            ratios,
            valid,
            "four-path",
            lambda flat, aa=a, nn=n: (
                aa,
                (flat % (nn * nn)) // nn,
                flat // (nn * nn),
                flat % nn,
            ),
        )


def check_bipartite_hypotheses(
    G: BipartiteGraph, eps: float, p: float
) -> UniformityReport:
    """Degree window and codegree cap for a bipartite graph.

    Checks every degree within (1 +- eps) m p and every same-side codegree at
    most (1 + eps) m p^2.  The codegree condition is one-sided: only excess
    above the cap counts toward the worst ratio.
    """
    eps, p = _check_eps_p(eps, p)
    m = G.m
    mat = G.matrix()
    matf = mat.astype(np.float32)
    worst = _Worst()
    worst.update_masked(
        np.abs(mat.sum(axis=1) / (m * p) - 1.0), None, "degree-a", lambda i: (i,)
    )
    worst.update_masked(
        np.abs(mat.sum(axis=0) / (m * p) - 1.0), None, "degree-b", lambda i: (i,)
    )
    cap = m * p**2
    upper = np.triu(np.ones((m, m), dtype=bool), 1)
    for name, cod in (
        ("codegree-a", matf @ matf.T),
        ("codegree-b", matf.T @ matf),
    ):
        excess = np.maximum(cod / cap - 1.0, 0.0)
        worst.update_masked(
            excess, upper, name, lambda flat, mm=m: (flat // mm, flat % mm)
        )
    return worst.report(eps, p, "exhaustive")


def empirical_digraph_params(D: Digraph) -> tuple[float, float]:
    """Empirical (eps_hat, p_hat) from density and degree deviations."""
    n = D.n
    p_hat = D.num_arcs / (n * (n - 1)) if n > 1 else 0.0
    if p_hat == 0.0:
        return 1.0, 0.0
    M = D.matrix()
    degs = np.concatenate([M.sum(axis=1), M.sum(axis=0)])
    eps_hat = float(np.abs(degs / (n * p_hat) - 1.0).max())
    return eps_hat, p_hat


def empirical_3graph_density(H: Hypergraph3) -> float:
    return H.num_edges / math.comb(H.n, 3)
