"""Edge packing of pseudo-random 3-uniform hypergraphs into tight Hamilton cycles.

The pipeline reduces hypergraphs to digraphs (pair contraction), digraphs
to bipartite graphs (half-permutation splits), and bipartite graphs to
perfect matchings (integer max-flow), then lifts matchings back up into
edge-disjoint Hamilton cycles.  Uniformity checkers, parameter schedules,
and an independent certifier round out the toolkit.
"""

from .certify import (
    KIND_DIRECTED,
    KIND_TIGHT,
    PackingResult,
    certification_report,
    certify_packing,
    validate_directed_cycle,
    validate_tight_cycle,
)
from .digraph_pack import (
    DigraphSplit,
    PackOptions,
    PackRun,
    RoundLog,
    SplitFamily,
    SplitOrder,
    cycle_from_matching,
    pack_digraph,
    split_digraph,
    split_family,
)
from .graphs import (
    BipartiteGraph,
    Digraph,
    EdgeListError,
    Hypergraph3,
    load_graph,
    read_graph,
    save_graph,
    write_graph,
)
from .hyper_pack import (
    CondensedCensus,
    ContractionFamily,
    HyperPackRun,
    PairContraction,
    PairOrder,
    condensed_census,
    contraction_family,
    pack_3graph,
    pair_contraction,
    tight_cycle_from_directed,
)
from .kernels import BACKEND, available_backends
from .matchings import (
    MatchingPacking,
    analytic_k,
    decompose_regular,
    edge_distribution_check,
    infeasible_cut,
    largest_k,
    max_k_regular,
    pack_matchings,
)
from .rng import TripleOracle, random_3graph, random_bipartite, random_digraph
from .schedule import Schedule, digraph_schedule, hyper_schedule
from .uniformity import (
    CATALOG,
    CHERRY,
    DOUBLE_THREE_PATH,
    SINGLE_EDGE,
    THREE_PATH,
    TWO_DISJOINT_EDGES,
    BudgetExceeded,
    ExtensionPattern,
    UniformityReport,
    check_3graph_uniform,
    check_bipartite_hypotheses,
    check_digraph_uniform,
    extension_count,
    extension_counts_all,
    full_catalog,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BipartiteGraph",
    "BudgetExceeded",
    "CATALOG",
    "CHERRY",
    "CondensedCensus",
    "ContractionFamily",
    "Digraph",
    "DigraphSplit",
    "DOUBLE_THREE_PATH",
    "EdgeListError",
    "ExtensionPattern",
    "HyperPackRun",
    "Hypergraph3",
    "KIND_DIRECTED",
    "KIND_TIGHT",
    "MatchingPacking",
    "PackOptions",
    "PackRun",
    "PackingResult",
    "PairContraction",
    "PairOrder",
    "RoundLog",
    "Schedule",
    "SINGLE_EDGE",
    "SplitFamily",
    "SplitOrder",
    "THREE_PATH",
    "TripleOracle",
    "TWO_DISJOINT_EDGES",
    "UniformityReport",
    "analytic_k",
    "available_backends",
    "certification_report",
    "certify_packing",
    "check_3graph_uniform",
    "check_bipartite_hypotheses",
    "check_digraph_uniform",
    "condensed_census",
    "contraction_family",
    "cycle_from_matching",
    "decompose_regular",
    "digraph_schedule",
    "edge_distribution_check",
    "extension_count",
    "extension_counts_all",
    "full_catalog",
    "hyper_schedule",
    "infeasible_cut",
    "largest_k",
    "load_graph",
    "max_k_regular",
    "pack_3graph",
    "pack_digraph",
    "pack_matchings",
    "pair_contraction",
    "random_3graph",
    "random_bipartite",
    "random_digraph",
    "read_graph",
    "save_graph",
    "split_digraph",
    "split_family",
    "tight_cycle_from_directed",
    "validate_directed_cycle",
    "validate_tight_cycle",
    "write_graph",
]
