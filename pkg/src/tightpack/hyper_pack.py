"""Packing edge-disjoint tight Hamilton cycles in a uniform 3-graph.

The route: draw a random vertex order and cut it into n/2 consecutive
pairs; pairs become digraph vertices, with an arc from pair (a, b) to pair
(c, d) when both {a, b, c} and {b, c, d} are hyperedges.  A directed
Hamilton cycle of that digraph concatenates back into a tight Hamilton
cycle whose n consecutive triples are exactly the two hyperedges of each
arc.  Drawing r independent pairings and labeling every covered hyperedge
with one covering construction thins the digraphs into layers whose lifted
tight cycles are hyperedge-disjoint.  The driver packs each layer with the
digraph packer, deletes used hyperedges, and advances the schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .certify import KIND_TIGHT, PackingResult, validate_directed_cycle, validate_tight_cycle
from .digraph_pack import PackOptions, RoundLog, draw_cover_labels, pack_digraph
from .graphs import Digraph, Hypergraph3
from .rng import (
    STREAM_PACK_DIGRAPH,
    STREAM_PAIRING,
    STREAM_PAIRING_LABELS,
    STREAM_SITES,
    check_seed,
    stream_key,
    substream,
)
from .schedule import Schedule, hyper_schedule
from .uniformity import DEFAULT_BUDGET, empirical_digraph_params


@dataclass(frozen=True)
class PairOrder:
    """A vertex order cut into consecutive pairs.

    pairs[j] = (order[2j], order[2j+1]); mate maps each vertex to the other
    member of its pair; first marks vertices drawn first in their pair.
    """

    order: np.ndarray
    pairs: np.ndarray
    mate: np.ndarray
    first: np.ndarray

    @classmethod
    def from_order(cls, order) -> "PairOrder":
        order = np.asarray(order, dtype=np.int64)
        n = order.size
        if n % 2 != 0 or n == 0:
            raise ValueError(f"need a positive even vertex count, got {n}")
        if not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError("order is not a permutation of 0..n-1")
        pairs = order.reshape(-1, 2).copy()
        mate = np.empty(n, dtype=np.int64)
        mate[pairs[:, 0]] = pairs[:, 1]
        mate[pairs[:, 1]] = pairs[:, 0]
        first = np.zeros(n, dtype=bool)
        first[pairs[:, 0]] = True
        for a in (order, pairs, mate, first):
            a.setflags(write=False)
        return cls(order=order, pairs=pairs, mate=mate, first=first)

    @property
    def n(self) -> int:
        return int(self.order.size)

    @property
    def half(self) -> int:
        return self.n // 2

    def mate_of(self, v: int) -> int:
        return int(self.mate[v])


@dataclass(frozen=True)
class PairContraction:
    """One pairing of a 3-graph and the digraph it induces.

    digraph lives on pair indices 0..n/2-1.  For the arc at row idx of
    digraph.arc_array, first_edge[idx] and second_edge[idx] are the two
    defining hyperedges (sorted triples); they are each other's partners
    under this pairing.  Within one contraction no hyperedge serves two
    arcs, checked at construction.
    """

    pairing: PairOrder
    digraph: Digraph
    first_edge: np.ndarray
    second_edge: np.ndarray

    @property
    def n(self) -> int:
        return self.pairing.n

    def partners(self, i: int, j: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """The two hyperedges defining arc i -> j."""
        key = np.uint64(i) * np.uint64(self.digraph.n) + np.uint64(j)
        idx = int(np.searchsorted(self.digraph._packed, key))
        if idx >= self.digraph._packed.size or self.digraph._packed[idx] != key:
            raise KeyError(f"no arc {i} -> {j} in this contraction")
        return tuple(self.first_edge[idx]), tuple(self.second_edge[idx])


def _pack_triples(n: int, triples: np.ndarray) -> np.ndarray:
    s = np.sort(np.asarray(triples, dtype=np.uint64), axis=1)
    nn = np.uint64(n)
    return (s[:, 0] * nn + s[:, 1]) * nn + s[:, 2]


def pair_contraction(
    H: Hypergraph3, seed: int | None = None, index: int = 0, order=None, path=()
) -> PairContraction:
    """Contract H along a drawn or supplied pairing order.

    Arc (i, j) exists iff {a_i, b_i, a_j} and {b_i, a_j, b_j} are both
    hyperedges, writing (a_k, b_k) for pair k.
    """
    if H.n % 2 != 0:
        raise ValueError(f"need an even number of vertices, got {H.n}")
    if order is None:
        if seed is None:
            raise ValueError("either a seed or an explicit order is required")
        check_seed(seed)
        rng = substream(seed, STREAM_PAIRING, *path, index)
        order = rng.permutation(H.n)
    pairing = PairOrder.from_order(order)
    h = pairing.half
    a = pairing.pairs[:, 0]
    b = pairing.pairs[:, 1]

    ii, jj = np.meshgrid(np.arange(h), np.arange(h), indexing="ij")
    off = ii != jj
    ii = ii[off]
    jj = jj[off]
    first = np.stack([a[ii], b[ii], a[jj]], axis=1)
    second = np.stack([b[ii], a[jj], b[jj]], axis=1)
    mask = H.has_triples(first) & H.has_triples(second)

    ii = ii[mask]
    jj = jj[mask]
    arcs_packed = ii.astype(np.uint64) * np.uint64(h) + jj.astype(np.uint64)
    order_idx = np.argsort(arcs_packed)
    digraph = Digraph.from_packed(h, arcs_packed[order_idx])
    first_edge = np.sort(first[mask][order_idx], axis=1)
    second_edge = np.sort(second[mask][order_idx], axis=1)

    used = np.concatenate([
        _pack_triples(H.n, first_edge),
        _pack_triples(H.n, second_edge),
    ]) if first_edge.size else np.empty(0, dtype=np.uint64)
    if np.unique(used).size != used.size:
        raise AssertionError("a hyperedge serves two arcs of one contraction")

    for arr in (first_edge, second_edge):
        arr.setflags(write=False)
    return PairContraction(
        pairing=pairing,
        digraph=digraph,
        first_edge=first_edge,
        second_edge=second_edge,
    )


def tight_cycle_from_directed(contraction: PairContraction, ordering) -> tuple[int, ...]:
    """Lift a directed Hamilton cycle of the paired digraph to a tight cycle.

    The output order concatenates the pairs along the cycle; its n
    consecutive triples are checked to be exactly the hyperedges of the
    traversed arcs, all distinct.
    """
    D = contraction.digraph
    ok, diag = validate_directed_cycle(D, ordering)
    if not ok:
        raise ValueError(f"not a Hamilton cycle of the paired digraph: {diag}")
    ordering = [int(v) for v in ordering]
    out = np.empty(contraction.n, dtype=np.int64)
    out[0::2] = contraction.pairing.pairs[ordering, 0]
    out[1::2] = contraction.pairing.pairs[ordering, 1]

    h = len(ordering)
    arc_edges = []
    for k in range(h):
        fe, se = contraction.partners(ordering[k], ordering[(k + 1) % h])
        arc_edges.append(fe)
        arc_edges.append(se)
    n = contraction.n
    lifted = [
        tuple(sorted((int(out[i]), int(out[(i + 1) % n]), int(out[(i + 2) % n]))))
        for i in range(n)
    ]
    if sorted(lifted) != sorted(arc_edges):
        raise AssertionError(
            "lifted cycle triples do not match the arc hyperedges"
        )
    if len(set(lifted)) != n:
        raise AssertionError("a hyperedge is claimed twice along one lifted cycle")
    return tuple(int(v) for v in out)


@dataclass(frozen=True)
class ContractionFamily:
    """r contractions of one 3-graph, thinned into hyperedge-disjoint layers.

    Covered hyperedges get a uniform label from their covering set; layer i
    keeps an arc only when both of its hyperedges carry label i.  Per layer,
    first/second hyperedges stay aligned with the thinned digraph's arcs.
    """

    n: int
    contractions: tuple[PairContraction, ...]
    thinned: tuple[Digraph, ...]
    thinned_first: tuple[np.ndarray, ...]
    thinned_second: tuple[np.ndarray, ...]
    edge_packed: np.ndarray
    edge_label: np.ndarray

    @property
    def r(self) -> int:
        return len(self.contractions)

    def label_of(self, u: int, v: int, w: int) -> int | None:
        key = _pack_triples(self.n, np.array([[u, v, w]]))[0]
        i = int(np.searchsorted(self.edge_packed, key))
        if i < self.edge_packed.size and self.edge_packed[i] == key:
            return int(self.edge_label[i])
        return None


def contraction_family(H: Hypergraph3, r: int, seed: int, path=()) -> ContractionFamily:
    """Draw r independent contractions and thin them into disjoint layers."""
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    check_seed(seed)
    contractions = tuple(
        pair_contraction(H, seed=seed, index=i, path=path) for i in range(r)
    )

    per_owner = []
    for c in contractions:
        if c.first_edge.size:
            per_owner.append(
                np.unique(
                    np.concatenate(
                        [
                            _pack_triples(H.n, c.first_edge),
                            _pack_triples(H.n, c.second_edge),
                        ]
                    )
                )
            )
        else:
            per_owner.append(np.empty(0, dtype=np.uint64))
    rng = substream(seed, STREAM_PAIRING_LABELS, *path)
    covered, labels = draw_cover_labels(per_owner, rng)

    def label_lookup(packed: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(covered, packed)
        return labels[idx]

    thinned = []
    thinned_first = []
    thinned_second = []
    kept_edges = []
    for i, c in enumerate(contractions):
        if c.first_edge.size == 0:
            thinned.append(Digraph(c.digraph.n))
            thinned_first.append(c.first_edge)
            thinned_second.append(c.second_edge)
            continue
        lab1 = label_lookup(_pack_triples(H.n, c.first_edge))
        lab2 = label_lookup(_pack_triples(H.n, c.second_edge))
        keep = (lab1 == i) & (lab2 == i)
        thinned.append(Digraph.from_packed(c.digraph.n, c.digraph._packed[keep]))
        fe = c.first_edge[keep]
        se = c.second_edge[keep]
        thinned_first.append(fe)
        thinned_second.append(se)
        if fe.size:
            kept_edges.append(_pack_triples(H.n, fe))
            kept_edges.append(_pack_triples(H.n, se))

    if kept_edges:
        merged = np.concatenate(kept_edges)
        if np.unique(merged).size != merged.size:
            raise AssertionError("thinned layers are not hyperedge-disjoint")
        if not H.has_triples(
            np.stack(
                [
                    (merged // (np.uint64(H.n) ** 2)).astype(np.int64),
                    ((merged // np.uint64(H.n)) % np.uint64(H.n)).astype(np.int64),
                    (merged % np.uint64(H.n)).astype(np.int64),
                ],
                axis=1,
            )
        ).all():
            raise AssertionError("thinned layer uses a hyperedge outside the input")
    for i in range(r):
        if thinned_first[i].shape[0] != thinned[i].num_arcs:
            raise AssertionError("hyperedge bookkeeping out of step with arcs")

    return ContractionFamily(
        n=H.n,
        contractions=contractions,
        thinned=tuple(thinned),
        thinned_first=tuple(thinned_first),
        thinned_second=tuple(thinned_second),
        edge_packed=covered,
        edge_label=labels,
    )


@dataclass(frozen=True)
class CondensedCensus:
    """Worst condensation count over 4-sets of vertices.

    A 4-set is condensed in a pairing when it is the union of two of that
    pairing's pairs.
    """

    max_count: int
    witness: tuple[int, int, int, int] | None
    sites_tested: int
    mode: str


def condensed_census(
    pairings,
    mode: str = "auto",
    sites: int = 10**4,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> CondensedCensus:
    """Count, per 4-set, the pairings condensing it; report the maximum.

    Exhaustive mode enumerates every pair-union of every pairing (any 4-set
    outside those has count 0), refused when r * C(n/2, 2) exceeds the
    budget.  Sampled mode draws ``sites`` distinct 4-sets.
    """
    pairings = list(pairings)
    if not pairings:
        return CondensedCensus(0, None, 0, "exhaustive")
    n = pairings[0].n
    h = pairings[0].half
    work = len(pairings) * (h * (h - 1)) // 2
    if mode == "auto":
        mode = "exhaustive" if work <= budget else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")

    if mode == "exhaustive":
        if work > budget:
            raise RuntimeError(
                f"exhaustive census needs {work} pair-unions, budget is {budget}"
            )
        counts: dict[tuple, int] = {}
        for P in pairings:
            pairs = P.pairs
            for j in range(h):
                for k in range(j + 1, h):
                    key = tuple(
                        sorted(
                            (
                                int(pairs[j, 0]),
                                int(pairs[j, 1]),
                                int(pairs[k, 0]),
                                int(pairs[k, 1]),
                            )
                        )
                    )
                    counts[key] = counts.get(key, 0) + 1
        if not counts:
            return CondensedCensus(0, None, 0, "exhaustive")
        witness, best = max(counts.items(), key=lambda kv: (kv[1], kv[0]))
        return CondensedCensus(int(best), witness, len(counts), "exhaustive")

    rng = substream(seed, STREAM_SITES, 200)
    quads = np.empty((sites, 4), dtype=np.int64)
    got = 0
    while got < sites:
        cand = rng.integers(0, n, size=(sites - got, 4))
        cand.sort(axis=1)
        okrows = (cand[:, 1:] != cand[:, :-1]).all(axis=1)
        kept = cand[okrows]
        quads[got : got + kept.shape[0]] = kept
        got += kept.shape[0]
    counts = np.zeros(sites, dtype=np.int64)
    sorted_quads = np.sort(quads, axis=1)
    for P in pairings:
        mates = np.sort(P.mate[quads], axis=1)
        counts += (mates == sorted_quads).all(axis=1)
    best = int(counts.max())
    widx = int(counts.argmax())
    return CondensedCensus(
        best, tuple(int(v) for v in sorted_quads[widx]), sites, "sampled"
    )


@dataclass(frozen=True)
class HyperPackRun:
    """A tight-cycle packing plus its schedule and per-round log."""

    result: PackingResult
    schedule: Schedule
    rounds: tuple[RoundLog, ...]
    options: PackOptions
    diagnostics: dict

    def report_dict(self) -> dict:
        return {
            "n": self.result.n,
            "rounds": [r.to_dict() for r in self.rounds],
            "cycles": self.result.num_cycles,
            "covered_edges": len(self.result.covered),
            "coverage_fraction": float(self.result.coverage_fraction),
            "schedule": self.schedule.to_dict(),
            "profile": self.options.profile,
            "diagnostics": self.diagnostics,
        }


def _clamp_param(x: float) -> float:
    return min(max(x, 1e-9), 1.0 - 1e-9)


def pack_3graph(
    H: Hypergraph3, eps: float, p: float, opts: PackOptions | None = None
) -> HyperPackRun:
    """Pack edge-disjoint tight Hamilton cycles of H, round by round.

    Needs n divisible by 4 so the paired digraph has an even vertex count.
    Each round contracts the residual r times, thins, packs every layer
    with the digraph packer, lifts its cycles, validates them against the
    residual, and deletes their hyperedges.  Stops at the schedule's T, at
    rounds_cap, or after a round with no cycles.

    opts.r caps the constructions per round here and in the nested digraph
    runs, which otherwise size their rounds from their layer's empirical
    density.  kappa, rounds_cap, and profile are shared with the nested
    runs as well.
    """
    if opts is None:
        opts = PackOptions()
    if H.n % 4 != 0:
        raise ValueError(f"need n divisible by 4, got {H.n}")
    sched = hyper_schedule(H.n, eps, p)
    limit = sched.T if opts.rounds_cap is None else min(sched.T, opts.rounds_cap)

    residual = H
    cycles: list[tuple[int, ...]] = []
    covered: list[tuple[int, int, int]] = []
    logs: list[RoundLog] = []
    pairings_seen: list[PairOrder] = []
    inner_runs = 0
    e_t, p_t = sched.eps0, sched.p0
    n = H.n
    total_triples = n * (n - 1) * (n - 2) // 6

    for t in range(limit):
        if residual.num_edges == 0:
            break
        p_hat = residual.num_edges / total_triples
        eps_hat = empirical_pair_eps(residual, p_hat)
        if opts.profile == "paper":
            kappa = sched.kappa(e_t)
            r_round = int(np.ceil(sched.r(e_t, p_t)))
            if not 16.0 * e_t < 1.0:
                raise ValueError(
                    f"paper profile needs 16*eps_t < 1, got {16.0 * e_t}"
                )
        else:
            kappa = opts.effective_kappa
            r_round = int(np.ceil(kappa * n / (3.0 * p_hat)))
            if opts.r is not None:
                r_round = min(r_round, opts.r)
        family = contraction_family(residual, r_round, opts.seed, path=(t,))
        pairings_seen.extend(c.pairing for c in family.contractions)

        round_cycles: list[tuple[int, ...]] = []
        round_triples: list[tuple[int, int, int]] = []
        for i in range(family.r):
            layer = family.thinned[i]
            if layer.num_arcs == 0 or layer.n % 2 != 0:
                continue
            if opts.profile == "paper":
                eps_d = 16.0 * e_t
                p_d = (p_t / kappa) ** 2
            else:
                ehat_d, phat_d = empirical_digraph_params(layer)
                eps_d = _clamp_param(ehat_d)
                p_d = _clamp_param(phat_d)
            child = replace(
                opts, seed=int(stream_key(opts.seed, STREAM_PACK_DIGRAPH, t, i))
            )
            run = pack_digraph(layer, eps_d, p_d, child)
            inner_runs += 1
            restricted = PairContraction(
                pairing=family.contractions[i].pairing,
                digraph=layer,
                first_edge=family.thinned_first[i],
                second_edge=family.thinned_second[i],
            )
            for ordering in run.result.cycles:
                tight = tight_cycle_from_directed(restricted, ordering)
                ok, diag = validate_tight_cycle(residual, tight)
                if not ok:
                    raise AssertionError(f"produced cycle failed validation: {diag}")
                round_cycles.append(tight)
                round_triples.extend(
                    tuple(sorted((tight[j], tight[(j + 1) % n], tight[(j + 2) % n])))
                    for j in range(n)
                )

        removed = 0
        if round_cycles:
            arr = np.asarray(round_triples, dtype=np.int64)
            packed = np.sort(_pack_triples(n, arr))
            if np.any(packed[1:] == packed[:-1]):
                raise AssertionError("round produced overlapping cycles")
            if not np.isin(packed, residual._packed).all():
                raise AssertionError("cycle hyperedge missing from the residual")
            residual = Hypergraph3.from_packed(
                n, np.setdiff1d(residual._packed, packed, assume_unique=True)
            )
            removed = int(packed.size)
            cycles.extend(round_cycles)
            covered.extend(round_triples)

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

    covered_set = set(covered)
    leftover = [e for e in H.edges() if e not in covered_set]
    result = PackingResult.build(KIND_TIGHT, n, cycles, covered_set, leftover)

    diagnostics: dict = {"inner_digraph_runs": inner_runs}
    if pairings_seen:
        census = condensed_census(
            pairings_seen, mode="sampled", sites=2000, seed=opts.seed
        )
        diagnostics["condensed_sampled_max"] = census.max_count
        diagnostics["condensed_sites"] = census.sites_tested
    return HyperPackRun(
        result=result,
        schedule=sched,
        rounds=tuple(logs),
        options=opts,
        diagnostics=diagnostics,
    )


def empirical_pair_eps(H: Hypergraph3, p_hat: float) -> float:
    """Worst relative pair-degree deviation from n * p_hat."""
    if p_hat <= 0:
        return 1.0
    n = H.n
    arr = H.edge_array
    if arr.shape[0] == 0:
        return 1.0
    pairs = np.concatenate(
        [
            arr[:, 0] * n + arr[:, 1],
            arr[:, 0] * n + arr[:, 2],
            arr[:, 1] * n + arr[:, 2],
        ]
    )
    deg = np.bincount(pairs, minlength=n * n).astype(np.float64)
    iu = np.triu_indices(n, 1)
    flat = deg.reshape(n, n)[iu]
    return float(np.abs(flat / (n * p_hat) - 1.0).max())
