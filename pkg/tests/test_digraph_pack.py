"""Order splitting, arc thinning, and the directed Hamilton cycle driver."""

import numpy as np
import pytest

from tightpack.certify import certify_packing, validate_directed_cycle
from tightpack.digraph_pack import (
    PackOptions,
    SplitOrder,
    cycle_from_matching,
    draw_cover_labels,
    pack_digraph,
    split_digraph,
    split_family,
)
from tightpack.graphs import BipartiteGraph, Digraph
from tightpack.rng import random_digraph, substream


# ---------------------------------------------------------------------------
# SplitOrder


def test_split_order_hand_case():
    s = SplitOrder.from_order([0, 1, 2, 3])
    assert s.A.tolist() == [0, 1]
    assert s.B.tolist() == [2, 3]
    # Successors wrap within each half.
    assert s.succ.tolist() == [1, 0, 3, 2]
    assert s.successor(2) == 3
    assert s.half == 2


def test_split_order_shuffled():
    s = SplitOrder.from_order([5, 1, 4, 0, 3, 2])
    assert s.A.tolist() == [5, 1, 4]
    assert s.B.tolist() == [0, 3, 2]
    assert s.successor(5) == 1
    assert s.successor(4) == 5
    assert s.successor(2) == 0


def test_split_order_validation():
    with pytest.raises(ValueError):
        SplitOrder.from_order([0, 1, 2])
    with pytest.raises(ValueError):
        SplitOrder.from_order([])
    with pytest.raises(ValueError):
        SplitOrder.from_order([0, 1, 1, 2])


# ---------------------------------------------------------------------------
# split_digraph


def test_split_complete_k4():
    split = split_digraph(Digraph.complete(4), order=[0, 1, 2, 3])
    assert split.base == BipartiteGraph.complete(2)
    want = {(0, 2), (2, 1), (0, 3), (3, 1), (1, 2), (2, 0), (1, 3), (3, 0)}
    assert set(split.lifted.arcs()) == want


def test_split_base_recount():
    D = random_digraph(12, 0.6, 19)
    split = split_digraph(D, seed=3, index=0)
    A, B, succ = split.perm.A, split.perm.B, split.perm.succ
    expect = {
        (k, l)
        for k in range(6)
        for l in range(6)
        if D.has_arc(int(A[k]), int(B[l])) and D.has_arc(int(B[l]), int(succ[A[k]]))
    }
    assert set(split.base.edges()) == expect
    # Each base edge lifts to exactly its two witness arcs.
    lifted = set()
    for k, l in expect:
        lifted.add((int(A[k]), int(B[l])))
        lifted.add((int(B[l]), int(succ[A[k]])))
    assert set(split.lifted.arcs()) == lifted


def test_split_determinism():
    D = random_digraph(10, 0.5, 4)
    a = split_digraph(D, seed=5, index=3)
    b = split_digraph(D, seed=5, index=3)
    c = split_digraph(D, seed=5, index=4)
    assert a.perm.order.tolist() == b.perm.order.tolist()
    assert a.base == b.base
    assert a.perm.order.tolist() != c.perm.order.tolist()


def test_split_validation():
    with pytest.raises(ValueError):
        split_digraph(Digraph.complete(5), seed=0)
    with pytest.raises(ValueError):
        split_digraph(Digraph.complete(4))


# ---------------------------------------------------------------------------
# cycle_from_matching


def test_cycle_from_matching_interleaves():
    split = split_digraph(Digraph.complete(4), order=[0, 1, 2, 3])
    cycle = cycle_from_matching(split, BipartiteGraph(2, [(0, 0), (1, 1)]))
    assert cycle == (0, 2, 1, 3)
    ok, diag = validate_directed_cycle(Digraph.complete(4), cycle)
    assert ok, diag


def test_cycle_from_matching_other_matching():
    split = split_digraph(Digraph.complete(4), order=[0, 1, 2, 3])
    assert cycle_from_matching(split, BipartiteGraph(2, [(0, 1), (1, 0)])) == (
        0,
        3,
        1,
        2,
    )


def test_cycle_from_matching_rejections():
    split = split_digraph(Digraph.complete(4), order=[0, 1, 2, 3])
    with pytest.raises(ValueError, match="not a perfect matching"):
        cycle_from_matching(split, BipartiteGraph(3, [(i, i) for i in range(3)]))
    with pytest.raises(ValueError, match="misses an A-vertex"):
        cycle_from_matching(split, BipartiteGraph(2, [(0, 0), (0, 1)]))
    with pytest.raises(ValueError, match="repeats a B-vertex"):
        cycle_from_matching(split, BipartiteGraph(2, [(0, 0), (1, 0)]))
    sparse = split_digraph(
        Digraph(4, [(0, 2), (2, 1), (1, 3), (3, 0)]), order=[0, 1, 2, 3]
    )
    assert set(sparse.base.edges()) == {(0, 0), (1, 1)}
    with pytest.raises(ValueError, match="outside the base graph"):
        cycle_from_matching(sparse, BipartiteGraph(2, [(0, 1), (1, 0)]))


# ---------------------------------------------------------------------------
# Cover labeling and thinning


def test_draw_cover_labels_membership():
    per_owner = [
        np.array([2, 5, 9], dtype=np.uint64),
        np.array([5, 9, 11], dtype=np.uint64),
        np.array([9], dtype=np.uint64),
    ]
    covered, labels = draw_cover_labels(per_owner, substream(0, 99))
    assert covered.tolist() == [2, 5, 9, 11]
    owner_sets = {2: {0}, 5: {0, 1}, 9: {0, 1, 2}, 11: {1}}
    for item, lab in zip(covered.tolist(), labels.tolist()):
        assert lab in owner_sets[item]


def test_draw_cover_labels_deterministic():
    per_owner = [np.arange(0, 40, 2, dtype=np.uint64), np.arange(0, 40, 3, dtype=np.uint64)]
    a = draw_cover_labels(per_owner, substream(7, 99))[1]
    b = draw_cover_labels(per_owner, substream(7, 99))[1]
    assert np.array_equal(a, b)


def test_draw_cover_labels_empty():
    covered, labels = draw_cover_labels([], substream(0, 99))
    assert covered.size == 0 and labels.size == 0


def test_split_family_layers_disjoint():
    D = random_digraph(10, 0.7, 8)
    fam = split_family(D, 6, seed=2)
    assert fam.r == 6
    seen = set()
    for i, layer in enumerate(fam.thinned):
        base_edges = set(fam.splits[i].base.edges())
        for k, l in layer.edges():
            assert (k, l) in base_edges
            perm = fam.splits[i].perm
            arcs = (
                (int(perm.A[k]), int(perm.B[l])),
                (int(perm.B[l]), int(perm.succ[perm.A[k]])),
            )
            for arc in arcs:
                assert arc not in seen
                seen.add(arc)
                assert fam.label_of(*arc) == i


def test_split_family_labels_cover_all_lifted():
    D = random_digraph(8, 0.6, 12)
    fam = split_family(D, 3, seed=5)
    union = set()
    for s in fam.splits:
        union.update(s.lifted.arcs())
    assert fam.arc_packed.size == len(union)
    for u, v in union:
        lab = fam.label_of(u, v)
        assert lab is not None
        assert (u, v) in set(fam.splits[lab].lifted.arcs())
    assert fam.label_of(0, 0) is None


def test_split_family_validation():
    with pytest.raises(ValueError):
        split_family(Digraph.complete(4), 0, seed=0)


# ---------------------------------------------------------------------------
# PackOptions


def test_pack_options_validation():
    with pytest.raises(ValueError):
        PackOptions(profile="fast")
    with pytest.raises(ValueError):
        PackOptions(profile="paper", kappa=2.0)
    with pytest.raises(ValueError):
        PackOptions(profile="paper", r=5)
    with pytest.raises(ValueError):
        PackOptions(profile="paper", rounds_cap=2)
    with pytest.raises(ValueError):
        PackOptions(kappa=0.5)
    with pytest.raises(ValueError):
        PackOptions(r=0)
    with pytest.raises(ValueError):
        PackOptions(rounds_cap=-1)
    with pytest.raises(ValueError):
        PackOptions(seed=-3)


def test_effective_kappa():
    assert PackOptions().effective_kappa == 2.0
    assert PackOptions(kappa=3.5).effective_kappa == 3.5
    assert PackOptions(profile="paper").effective_kappa is None


# ---------------------------------------------------------------------------
# Driver


def test_pack_digraph_complete_frozen():
    D = Digraph.complete(8)
    run = pack_digraph(D, 0.2, 0.99, PackOptions(kappa=1.0, r=4, rounds_cap=3, seed=0))
    assert run.result.num_cycles == 3
    assert len(run.result.covered) == 24
    assert len(run.rounds) == 2
    certified, violations = certify_packing(D, run.result)
    assert certified, violations


def test_pack_digraph_random_frozen():
    D = random_digraph(16, 0.8, 2)
    run = pack_digraph(D, 0.3, 0.8, PackOptions(kappa=1.0, r=2, rounds_cap=10, seed=0))
    assert run.result.num_cycles == 2
    assert len(run.result.covered) == 32
    assert len(run.rounds) == 2
    certified, violations = certify_packing(D, run.result)
    assert certified, violations


def test_pack_digraph_deterministic():
    D = random_digraph(12, 0.75, 6)
    opts = PackOptions(rounds_cap=4, seed=9)
    a = pack_digraph(D, 0.3, 0.75, opts)
    b = pack_digraph(D, 0.3, 0.75, opts)
    assert a.result.cycles == b.result.cycles
    assert a.report_dict() == b.report_dict()


def test_pack_digraph_acyclic_stagnates():
    # All arcs point upward, so no directed cycle exists at all; the driver
    # must stop after one empty round.
    arcs = [(i, j) for i in range(8) for j in range(i + 1, 8)]
    run = pack_digraph(Digraph(8, arcs), 0.3, 0.5, PackOptions(rounds_cap=5, seed=0))
    assert run.result.num_cycles == 0
    assert len(run.rounds) == 1
    assert len(run.result.leftover) == len(arcs)
    assert certify_packing(Digraph(8, arcs), run.result)[0]


def test_pack_digraph_empty():
    run = pack_digraph(Digraph(8), 0.3, 0.5, PackOptions(seed=0))
    assert run.result.num_cycles == 0
    assert run.rounds == ()
    run_paper = pack_digraph(Digraph(8), 0.3, 0.5, PackOptions(profile="paper"))
    assert run_paper.result.num_cycles == 0


def test_pack_digraph_odd_n():
    with pytest.raises(ValueError):
        pack_digraph(Digraph.complete(7), 0.3, 0.5)


def test_round_log_and_report():
    D = Digraph.complete(8)
    run = pack_digraph(D, 0.2, 0.99, PackOptions(kappa=1.0, r=4, rounds_cap=3, seed=0))
    rep = run.report_dict()
    assert sorted(rep) == [
        "coverage_fraction",
        "covered_arcs",
        "cycles",
        "n",
        "profile",
        "rounds",
        "schedule",
    ]
    assert rep["profile"] == "desk"
    assert rep["n"] == 8
    first = rep["rounds"][0]
    assert sorted(first) == [
        "cycles",
        "eps_hat",
        "eps_t",
        "index",
        "kappa",
        "p_hat",
        "p_t",
        "r",
        "removed",
    ]
    assert first["index"] == 0
    assert first["r"] <= 4
    assert first["removed"] == 8 * first["cycles"]


def test_pack_digraph_r_cap_binds():
    # Without the cap, the desk formula asks for ceil(2*kappa/p_hat) splits.
    D = Digraph.complete(8)
    run = pack_digraph(D, 0.2, 0.99, PackOptions(kappa=1.0, r=1, rounds_cap=1, seed=0))
    assert run.rounds[0].r == 1
