"""Independent certification of packing outputs.

Validators here work from raw edge sets rebuilt by iterating the input
graph; they share no traversal or membership code with the packers, so a
bug upstream cannot mask itself downstream.  A tight Hamilton cycle is a
cyclic vertex order whose n consecutive triples are all distinct hyperedges;
a directed Hamilton cycle is a cyclic order whose n consecutive arcs all
exist.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import Digraph, Hypergraph3

KIND_TIGHT = "tight-3graph"
KIND_DIRECTED = "directed"


@dataclass(frozen=True)
class PackingResult:
    """Cycles plus exact coverage accounting for one packing run.

    covered holds the edges (sorted triples) or arcs (ordered pairs) the
    producer claims its cycles use; leftover is the rest of the input.
    certify_packing re-derives both from the cycle orderings alone.
    """

    kind: str
    n: int
    cycles: tuple[tuple[int, ...], ...]
    covered: frozenset[tuple[int, ...]]
    leftover: frozenset[tuple[int, ...]]
    coverage_fraction: Fraction

    def __post_init__(self):
        if self.kind not in (KIND_TIGHT, KIND_DIRECTED):
            raise ValueError(f"unknown packing kind {self.kind!r}")
        if self.covered & self.leftover:
            raise ValueError("covered and leftover overlap")

    @classmethod
    def build(cls, kind, n, cycles, covered, leftover) -> "PackingResult":
        covered = frozenset(covered)
        leftover = frozenset(leftover)
        total = len(covered) + len(leftover)
        fraction = Fraction(len(covered), total) if total else Fraction(0)
        return cls(
            kind=kind,
            n=int(n),
            cycles=tuple(tuple(int(v) for v in c) for c in cycles),
            covered=covered,
            leftover=leftover,
            coverage_fraction=fraction,
        )

    @property
    def num_cycles(self) -> int:
        return len(self.cycles)


def cycle_triples(ordering) -> list[tuple[int, int, int]]:
    """The n consecutive sorted triples of a cyclic vertex order."""
    n = len(ordering)
    return [
        tuple(sorted((ordering[i], ordering[(i + 1) % n], ordering[(i + 2) % n])))
        for i in range(n)
    ]


def cycle_arcs(ordering) -> list[tuple[int, int]]:
    """The n consecutive arcs of a cyclic vertex order."""
    n = len(ordering)
    return [(ordering[i], ordering[(i + 1) % n]) for i in range(n)]


def validate_tight_cycle(H: Hypergraph3, ordering) -> tuple[bool, str | None]:
    """Check a vertex order is a tight Hamilton cycle of H.

    Returns (True, None) or (False, diagnostic naming the first violation).
    """
    ordering = [int(v) for v in ordering]
    if len(ordering) != H.n:
        raise ValueError(f"ordering has {len(ordering)} vertices, expected {H.n}")
    if sorted(ordering) != list(range(H.n)):
        return False, "ordering is not a permutation of the vertex set"
    edge_set = {e for e in H.edges()}
    triples = cycle_triples(ordering)
    for i, tri in enumerate(triples):
        if len(set(tri)) != 3:
            return False, f"triple {i} has repeated vertices: {tri}"
        if tri not in edge_set:
            return False, f"triple {i} is not a hyperedge: {tri}"
    if len(set(triples)) != len(triples):
        dup = next(t for t in triples if triples.count(t) > 1)
        return False, f"triple {dup} appears more than once along the cycle"
    return True, None


def validate_directed_cycle(D: Digraph, ordering) -> tuple[bool, str | None]:
    """Check a vertex order is a directed Hamilton cycle of D."""
    ordering = [int(v) for v in ordering]
    if len(ordering) != D.n:
        raise ValueError(f"ordering has {len(ordering)} vertices, expected {D.n}")
    if sorted(ordering) != list(range(D.n)):
        return False, "ordering is not a permutation of the vertex set"
    arc_set = {a for a in D.arcs()}
    for i, arc in enumerate(cycle_arcs(ordering)):
        if arc not in arc_set:
            return False, f"arc {i} is missing from the digraph: {arc[0]}->{arc[1]}"
    return True, None


def _input_edges(graph) -> set[tuple[int, ...]]:
    if isinstance(graph, Hypergraph3):
        return set(graph.edges())
    return set(graph.arcs())


def certify_packing(graph, result: PackingResult) -> tuple[bool, list[str]]:
    """Full certification: cycle validity, disjointness, exact accounting.

    Pure and read-only; returns (certified, violations).  An empty result
    certifies trivially with coverage 0.
    """
    if isinstance(graph, Hypergraph3):
        if result.kind != KIND_TIGHT:
            raise TypeError(f"3-graph input needs kind {KIND_TIGHT!r}, got {result.kind!r}")
        validate = validate_tight_cycle
        edges_of = cycle_triples
    elif isinstance(graph, Digraph):
        if result.kind != KIND_DIRECTED:
            raise TypeError(
                f"digraph input needs kind {KIND_DIRECTED!r}, got {result.kind!r}"
            )
        validate = validate_directed_cycle
        edges_of = cycle_arcs
    else:
        raise TypeError(f"cannot certify packing over {type(graph).__name__}")

    violations: list[str] = []
    if result.n != graph.n:
        violations.append(f"result says n={result.n}, graph has n={graph.n}")

    used: dict[tuple[int, ...], int] = {}
    for idx, ordering in enumerate(result.cycles):
        try:
            ok, diag = validate(graph, ordering)
        except ValueError as exc:
            ok, diag = False, str(exc)
        if not ok:
            violations.append(f"cycle {idx}: {diag}")
            continue
        for e in edges_of(list(ordering)):
            if e in used:
                violations.append(
                    f"cycle {idx} reuses {e} already used by cycle {used[e]}"
                )
            else:
                used[e] = idx

    derived_covered = set(used)
    if derived_covered != set(result.covered):
        missing = sorted(derived_covered - set(result.covered))[:3]
        extra = sorted(set(result.covered) - derived_covered)[:3]
        violations.append(
            f"covered set mismatch: cycles use {len(derived_covered)} edges, "
            f"result lists {len(result.covered)}"
            + (f"; unlisted e.g. {missing}" if missing else "")
            + (f"; overlisted e.g. {extra}" if extra else "")
        )

    all_edges = _input_edges(graph)
    bogus = sorted(set(result.covered) - all_edges)[:3]
    if bogus:
        violations.append(f"covered edges absent from the input, e.g. {bogus}")
    expected_leftover = all_edges - set(result.covered)
    if expected_leftover != set(result.leftover):
        violations.append(
            f"leftover mismatch: expected {len(expected_leftover)} edges, "
            f"result lists {len(result.leftover)}"
        )

    total = len(all_edges)
    expected_fraction = Fraction(len(result.covered), total) if total else Fraction(0)
    if result.coverage_fraction != expected_fraction:
        violations.append(
            f"coverage fraction {result.coverage_fraction} != {expected_fraction}"
        )

    return not violations, violations


def certification_report(graph, result: PackingResult) -> dict:
    """JSON-ready report: kind, n, num_cycles, coverage_fraction, certified, violations."""
    certified, violations = certify_packing(graph, result)
    return {
        "kind": result.kind,
        "n": graph.n,
        "num_cycles": result.num_cycles,
        "coverage_fraction": float(result.coverage_fraction),
        "certified": certified,
        "violations": violations,
    }
