"""Packing arc-disjoint directed Hamilton cycles in a uniform digraph.

The route: draw a random vertex order, halve it into A and B with a cyclic
successor inside each half, and keep base edge (a, b) when both arcs a->b
and b->succ(a) exist.  A perfect matching of that bipartite base graph then
interleaves into a directed Hamilton cycle.  Drawing r independent orders
and labeling every covered arc with one covering order thins the r base
graphs into arc-disjoint layers, so their matchings give arc-disjoint
cycles.  The driver repeats this round structure, deleting used arcs and
advancing the (eps_t, p_t) schedule, until the schedule stops or a round
yields nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import KIND_DIRECTED, PackingResult, validate_directed_cycle
from .graphs import BipartiteGraph, Digraph
from .matchings import empirical_bipartite_params, pack_matchings
from .rng import STREAM_SPLIT, STREAM_SPLIT_LABELS, check_seed, substream
from .schedule import Schedule, digraph_schedule
from .uniformity import empirical_digraph_params


@dataclass(frozen=True)
class SplitOrder:
    """A vertex order split into halves with cyclic successors.

    A is the first half of ``order``, B the second; succ maps each vertex to
    the next one in its own half, wrapping within the half.
    """

    order: np.ndarray
    A: np.ndarray
    B: np.ndarray
    succ: np.ndarray

    @classmethod
    def from_order(cls, order) -> "SplitOrder":
        order = np.asarray(order, dtype=np.int64)
        n = order.size
        if n % 2 != 0 or n == 0:
            raise ValueError(f"need a positive even vertex count, got {n}")
        if not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("order is not a permutation of 0..n-1")
        h = n // 2
        A = order[:h].copy()
        B = order[h:].copy()
        succ = np.empty(n, dtype=np.int64)
        succ[A] = np.roll(A, -1)
        succ[B] = np.roll(B, -1)
        for a in (order, A, B, succ):
            a.setflags(write=False)
        return cls(order=order, A=A, B=B, succ=succ)

    @property
    def n(self) -> int:
        return int(self.order.size)

    @property
    def half(self) -> int:
        return self.n // 2

    def successor(self, v: int) -> int:
        return int(self.succ[v])


@dataclass(frozen=True)
class DigraphSplit:
    """One split of a digraph: the base bipartite graph and its arc lift.

    base lives in position space: edge (k, l) stands for vertex pair
    (A[k], B[l]) and exists iff arcs A[k]->B[l] and B[l]->succ(A[k]) are
    both present.  lifted holds exactly those arcs; the 2-to-1 edge-to-arc
    map is checked injective at construction.
    """

    perm: SplitOrder
    base: BipartiteGraph
    lifted: Digraph

    @property
    def n(self) -> int:
        return self.perm.n


def _base_matrix(D: Digraph, perm: SplitOrder) -> np.ndarray:
    M = D.matrix()
    rollA = perm.succ[perm.A]
    return M[np.ix_(perm.A, perm.B)] & M[np.ix_(perm.B, rollA)].T


def _lift_packed(D_n: int, perm: SplitOrder, edge_arr: np.ndarray) -> np.ndarray:
    """Packed arcs (u*n+v) lifted from position-space base edges, unsorted."""
    ks = edge_arr[:, 0]
    ls = edge_arr[:, 1]
    rollA = perm.succ[perm.A]
    tails = np.concatenate([perm.A[ks], perm.B[ls]]).astype(np.uint64)
    heads = np.concatenate([perm.B[ls], rollA[ks]]).astype(np.uint64)
    return tails * np.uint64(D_n) + heads


def split_digraph(
    D: Digraph, seed: int | None = None, index: int = 0, order=None, path=()
) -> DigraphSplit:
    """Build one split of D from a drawn or supplied vertex order.

    Either ``order`` is given explicitly or it is drawn from the substream
    (seed, split, *path, index).
    """
    if D.n % 2 != 0:
        raise ValueError(f"need an even number of vertices, got {D.n}")
    if order is None:
        if seed is None:
            raise ValueError("either a seed or an explicit order is required")
        check_seed(seed)
        rng = substream(seed, STREAM_SPLIT, *path, index)
        order = rng.permutation(D.n)
    perm = SplitOrder.from_order(order)
    base_mat = _base_matrix(D, perm)
    base = BipartiteGraph.from_matrix(base_mat)
    packed = _lift_packed(D.n, perm, base.edge_array)
    unique = np.unique(packed)
    if unique.size != packed.size:
        raise AssertionError("lifted arcs collide; the 2-to-1 map is not injective")
    arr = np.stack([unique // np.uint64(D.n), unique % np.uint64(D.n)], axis=1)
    if not D.has_arcs(arr.astype(np.int64)).all():
        raise AssertionError("lifted arc missing from the source digraph")
    lifted = Digraph.from_packed(D.n, unique)
    return DigraphSplit(perm=perm, base=base, lifted=lifted)


def cycle_from_matching(split: DigraphSplit, matching: BipartiteGraph) -> tuple[int, ...]:
    """Interleave a perfect matching of the base into a Hamilton cycle.

    Walks A in cyclic position order, inserting each matched B-vertex:
    A[0], B[match(0)], A[1], B[match(1)], ...  Every consecutive arc is one
    of the two lifted arcs of a matching edge.
    """
    h = split.perm.half
    arr = matching.edge_array
    if matching.m != h or arr.shape[0] != h:
        raise ValueError("matching is not a perfect matching of the base graph")
    if not np.array_equal(arr[:, 0], np.arange(h)):
        raise ValueError("matching misses an A-vertex")
    if np.unique(arr[:, 1]).size != h:
        raise ValueError("matching repeats a B-vertex")
    if not all(split.base.has_edge(int(k), int(l)) for k, l in arr):
        raise ValueError("matching uses an edge outside the base graph")
    out = np.empty(split.n, dtype=np.int64)
    out[0::2] = split.perm.A
    out[1::2] = split.perm.B[arr[:, 1]]
    return tuple(int(v) for v in out)


@dataclass(frozen=True)
class SplitFamily:
    """r splits of one digraph, thinned into arc-disjoint layers.

    Every arc covered by at least one lifted graph gets a uniform label
    from its covering set; layer i keeps a base edge only when both of its
    lifted arcs carry label i.  arc_packed/arc_label record the assignment
    over covered arcs (packed u*n+v, ascending).
    """

    n: int
    splits: tuple[DigraphSplit, ...]
    thinned: tuple[BipartiteGraph, ...]
    arc_packed: np.ndarray
    arc_label: np.ndarray

    @property
    def r(self) -> int:
        return len(self.splits)

    def label_of(self, u: int, v: int) -> int | None:
        key = np.uint64(u) * np.uint64(self.n) + np.uint64(v)
        i = int(np.searchsorted(self.arc_packed, key))
        if i < self.arc_packed.size and self.arc_packed[i] == key:
            return int(self.arc_label[i])
        return None


def draw_cover_labels(per_owner: list[np.ndarray], rng) -> tuple[np.ndarray, np.ndarray]:
    """Assign each covered item a uniform label from its covering set.

    per_owner[i] holds the packed items owned by construction i.  Returns
    (covered, labels): the ascending union and, per item, one owner drawn
    uniformly from those listing it.  Draw order follows the ascending
    union, so the assignment is reproducible for a fixed rng state.
    """
    r = len(per_owner)
    all_packed = (
        np.concatenate(per_owner) if per_owner else np.empty(0, dtype=np.uint64)
    )
    owners = np.repeat(
        np.arange(r, dtype=np.int64), [p.size for p in per_owner]
    )
    order = np.lexsort((owners, all_packed))
    sorted_packed = all_packed[order]
    sorted_owner = owners[order]
    covered, start, counts = np.unique(
        sorted_packed, return_index=True, return_counts=True
    )
    if covered.size:
        labels = sorted_owner[start + rng.integers(0, counts)]
    else:
        labels = np.empty(0, dtype=np.int64)
    return covered, labels


def split_family(D: Digraph, r: int, seed: int, path=()) -> SplitFamily:
    """Draw r independent splits and thin them into disjoint layers."""
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    check_seed(seed)
    splits = tuple(
        split_digraph(D, seed=seed, index=i, path=path) for i in range(r)
    )

    rng = substream(seed, STREAM_SPLIT_LABELS, *path)
    covered, labels = draw_cover_labels([s.lifted._packed for s in splits], rng)

    def label_lookup(packed: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(covered, packed)
        return labels[idx]

    thinned = []
    kept_arcs = []
    for i, s in enumerate(splits):
        arr = s.base.edge_array
        if arr.shape[0] == 0:
            thinned.append(BipartiteGraph(s.perm.half))
            continue
        half_arcs = _lift_packed(D.n, s.perm, arr)
        arc1 = half_arcs[: arr.shape[0]]
        arc2 = half_arcs[arr.shape[0] :]
        keep = (label_lookup(arc1) == i) & (label_lookup(arc2) == i)
        thinned.append(BipartiteGraph(s.perm.half, arr[keep]))
        kept_arcs.append(arc1[keep])
        kept_arcs.append(arc2[keep])

    if kept_arcs:
        merged = np.concatenate(kept_arcs)
        if np.unique(merged).size != merged.size:
            raise AssertionError("thinned layers are not arc-disjoint")
        if not np.isin(merged, D._packed).all():
            raise AssertionError("thinned layer uses an arc outside the digraph")

    return SplitFamily(
        n=D.n,
        splits=splits,
        thinned=tuple(thinned),
        arc_packed=covered,
        arc_label=labels,
    )


@dataclass(frozen=True)
class PackOptions:
    """Driver knobs.

    profile "paper" runs the schedule's own kappa_t and r_t and forbids
    overrides; "desk" uses a constant kappa >= 1 (default 2) with
    r = ceil(2 kappa / p_hat) against the empirical density, where the r
    field caps that count per round.  rounds_cap limits rounds; in paper
    profile both caps must be left unset.
    """

    profile: str = "desk"
    kappa: float | None = None
    r: int | None = None
    rounds_cap: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.profile not in ("paper", "desk"):
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.profile == "paper":
            if self.kappa is not None or self.r is not None or self.rounds_cap is not None:
                raise ValueError("paper profile forbids kappa/r/rounds_cap overrides")
        else:
            if self.kappa is not None and self.kappa < 1:
                raise ValueError(f"desk profile needs kappa >= 1, got {self.kappa}")
            if self.r is not None and self.r < 1:
                raise ValueError(f"r override must be >= 1, got {self.r}")
            if self.rounds_cap is not None and self.rounds_cap < 0:
                raise ValueError(f"rounds_cap must be >= 0, got {self.rounds_cap}")
        check_seed(self.seed)

    @property
    def effective_kappa(self) -> float | None:
        if self.profile == "desk":
            return 2.0 if self.kappa is None else float(self.kappa)
        return None


@dataclass(frozen=True)
class RoundLog:
    """Effective parameters and outcome of one driver round.

    ``removed`` counts arcs for the digraph driver and hyperedges for the
    3-graph driver; eps_hat/p_hat are the residual's empirical parameters
    measured before the round ran.
    """

    index: int
    eps_t: float
    p_t: float
    kappa: float
    r: int
    cycles: int
    removed: int
    eps_hat: float
    p_hat: float

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "eps_t": self.eps_t,
            "p_t": self.p_t,
            "kappa": self.kappa,
            "r": self.r,
            "cycles": self.cycles,
            "removed": self.removed,
            "eps_hat": self.eps_hat,
            "p_hat": self.p_hat,
        }


@dataclass(frozen=True)
class PackRun:
    """A packing result plus the schedule and per-round log behind it."""

    result: PackingResult
    schedule: Schedule
    rounds: tuple[RoundLog, ...]
    options: PackOptions

    def report_dict(self) -> dict:
        return {
            "n": self.result.n,
            "rounds": [r.to_dict() for r in self.rounds],
            "cycles": self.result.num_cycles,
            "covered_arcs": len(self.result.covered),
            "coverage_fraction": float(self.result.coverage_fraction),
            "schedule": self.schedule.to_dict(),
            "profile": self.options.profile,
        }


def pack_digraph(D: Digraph, eps: float, p: float, opts: PackOptions | None = None) -> PackRun:
    """Pack arc-disjoint directed Hamilton cycles of D, round by round.

    Every produced cycle is validated against the residual digraph before
    its arcs are deleted.  Stops at the schedule's index T, at rounds_cap,
    or after the first round with no cycles.
    """
    if opts is None:
        opts = PackOptions()
    if D.n % 2 != 0:
        raise ValueError(f"need an even number of vertices, got {D.n}")
    sched = digraph_schedule(D.n, eps, p)
    limit = sched.T if opts.rounds_cap is None else min(sched.T, opts.rounds_cap)

    residual = D
    cycles: list[tuple[int, ...]] = []
    covered: list[tuple[int, int]] = []
    logs: list[RoundLog] = []
    e_t, p_t = sched.eps0, sched.p0

    for t in range(limit):
        if residual.num_arcs == 0:
            break
        eps_hat, p_hat = empirical_digraph_params(residual)
        if opts.profile == "paper":
            kappa = sched.kappa(e_t)
            r_round = int(np.ceil(sched.r(e_t, p_t)))
        else:
            if p_hat <= 0:
                break
            kappa = opts.effective_kappa
            r_round = int(np.ceil(2.0 * kappa / p_hat))
            if opts.r is not None:
                r_round = min(r_round, opts.r)
        family = split_family(residual, r_round, opts.seed, path=(t,))

        round_cycles: list[tuple[int, ...]] = []
        for i, layer in enumerate(family.thinned):
            if layer.num_edges == 0:
                continue
            ehat, phat = empirical_bipartite_params(layer)
            mp = pack_matchings(layer, ehat, phat if phat > 0 else 1.0)
            for M in mp.matchings:
                ordering = cycle_from_matching(family.splits[i], M)
                ok, diag = validate_directed_cycle(residual, ordering)
                if not ok:
                    raise AssertionError(f"produced cycle failed validation: {diag}")
                round_cycles.append(ordering)

        removed = 0
        if round_cycles:
            arcs = []
            for ordering in round_cycles:
                arcs.extend(
                    (ordering[j], ordering[(j + 1) % len(ordering)])
                    for j in range(len(ordering))
                )
            arr = np.asarray(arcs, dtype=np.int64)
            packed = arr[:, 0].astype(np.uint64) * np.uint64(D.n) + arr[:, 1].astype(
                np.uint64
            )
            packed = np.sort(packed)
            if np.any(packed[1:] == packed[:-1]):
                raise AssertionError("round produced overlapping cycles")
            if not np.isin(packed, residual._packed).all():
                raise AssertionError("cycle arc missing from the residual digraph")
            residual = Digraph.from_packed(
                D.n, np.setdiff1d(residual._packed, packed, assume_unique=True)
            )
            removed = int(packed.size)
            cycles.extend(round_cycles)
            covered.extend(arcs)

        logs.append(
            RoundLog(
                index=t,
                eps_t=e_t,
                p_t=p_t,
                kappa=float(kappa),
                r=r_round,
                cycles=len(round_cycles),
                removed=removed,
                eps_hat=eps_hat,
                p_hat=p_hat,
            )
        )
        if not round_cycles:
            break
        e_t, p_t = sched._step(e_t, p_t)

    leftover = [a for a in D.arcs()]
    covered_set = set(covered)
    leftover = [a for a in leftover if a not in covered_set]
    result = PackingResult.build(
        KIND_DIRECTED, D.n, cycles, covered_set, leftover
    )
    return PackRun(result=result, schedule=sched, rounds=tuple(logs), options=opts)
