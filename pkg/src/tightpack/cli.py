"""Command-line interface.

Subcommands: gen, check, pack-bipartite, pack-digraph, pack-3graph, verify,
diagnose.  Exit codes: 0 on success (and, where a verdict applies, when it
is positive), 1 when a check or certification fails, 2 for unusable input
or invalid flag combinations.  The default seed comes from TIGHTPACK_SEED
when set.  Reports are JSON with sorted keys; the timestamp field is the
only part that varies between identical runs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone

from .certify import (
    KIND_DIRECTED,
    KIND_TIGHT,
    PackingResult,
    certify_packing,
    cycle_arcs,
    cycle_triples,
)
from .digraph_pack import PackOptions, pack_digraph
from .graphs import BipartiteGraph, Digraph, EdgeListError, Hypergraph3, load_graph, save_graph
from .hyper_pack import (
    condensed_census,
    empirical_pair_eps,
    pack_3graph,
    pair_contraction,
)
from .matchings import empirical_bipartite_params, pack_matchings
from .rng import random_3graph, random_bipartite, random_digraph
from .uniformity import (
    CATALOG,
    DEFAULT_BUDGET,
    DEFAULT_SITES,
    BudgetExceeded,
    check_3graph_uniform,
    check_bipartite_hypotheses,
    check_digraph_uniform,
    empirical_digraph_params,
    full_catalog,
)


def _default_seed() -> int:
    raw = os.environ.get("TIGHTPACK_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"TIGHTPACK_SEED is not an integer: {raw!r}") from None


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_cycles(path: str, cycles) -> None:
    """One cycle per line, vertices space-separated."""
    with open(path, "w", encoding="utf-8") as fh:
        for cyc in cycles:
            fh.write(" ".join(str(int(v)) for v in cyc) + "\n")


def read_cycles(path: str) -> list[tuple[int, ...]]:
    """Parse a cycles file; '#' starts a comment, blank lines are skipped."""
    cycles = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                cycles.append(tuple(int(tok) for tok in line.split()))
            except ValueError:
                raise EdgeListError("cycle line is not a vertex sequence", lineno)
    return cycles


def _cmd_gen(args) -> int:
    if args.kind == "3graph":
        graph = random_3graph(args.n, args.p, args.seed)
    elif args.kind == "digraph":
        graph = random_digraph(args.n, args.p, args.seed)
    else:
        graph = random_bipartite(args.n, args.p, args.seed)
    save_graph(graph, args.out)
    return 0


def _cmd_check(args) -> int:
    graph = load_graph(args.input)
    kwargs = dict(mode=args.mode, sites=args.sites, seed=args.seed, budget=args.budget)
    if isinstance(graph, Hypergraph3):
        catalog = CATALOG if args.catalog == "named" else tuple(full_catalog())
        report = check_3graph_uniform(graph, args.epsilon, args.p, catalog=catalog, **kwargs)
    elif isinstance(graph, Digraph):
        report = check_digraph_uniform(graph, args.epsilon, args.p, **kwargs)
    else:
        report = check_bipartite_hypotheses(graph, args.epsilon, args.p)
    payload = json.loads(report.to_json())
    payload["timestamp"] = _timestamp()
    _emit(payload, args.report)
    return 0 if report.uniform else 1


def _cmd_pack_bipartite(args) -> int:
    graph = load_graph(args.input)
    if not isinstance(graph, BipartiteGraph):
        raise ValueError("pack-bipartite needs a bipartite input")
    mp = pack_matchings(graph, args.epsilon, args.p)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for i, M in enumerate(mp.matchings):
                fh.write(f"# matching {i}\n")
                for a, b in M.edges():
                    fh.write(f"{a} {b}\n")
    payload = {
        "m": mp.m,
        "k": mp.k,
        "analytic_k": mp.analytic_k,
        "leftover_fraction": float(mp.leftover_fraction),
        "timestamp": _timestamp(),
    }
    _emit(payload, args.report)
    return 0


def _pack_options(args) -> PackOptions:
    return PackOptions(
        profile=args.profile,
        kappa=args.kappa,
        r=args.r,
        rounds_cap=args.rounds_cap,
        seed=args.seed,
    )


def _cmd_pack_digraph(args) -> int:
    graph = load_graph(args.input)
    if not isinstance(graph, Digraph):
        raise ValueError("pack-digraph needs a digraph input")
    run = pack_digraph(graph, args.epsilon, args.p, _pack_options(args))
    certified, violations = certify_packing(graph, run.result)
    if args.cycles:
        write_cycles(args.cycles, run.result.cycles)
    payload = run.report_dict()
    payload["certified"] = certified
    payload["violations"] = violations
    payload["timestamp"] = _timestamp()
    _emit(payload, args.report)
    return 0 if certified else 1


def _cmd_pack_3graph(args) -> int:
    graph = load_graph(args.input)
    if not isinstance(graph, Hypergraph3):
        raise ValueError("pack-3graph needs a 3-graph input")
    if graph.n % 4 != 0:
        raise ValueError(
            f"n must be divisible by 4 for tight-cycle packing, got n={graph.n}"
        )
    run = pack_3graph(graph, args.epsilon, args.p, _pack_options(args))
    certified, violations = certify_packing(graph, run.result)
    if args.cycles:
        write_cycles(args.cycles, run.result.cycles)
    payload = run.report_dict()
    payload["certified"] = certified
    payload["violations"] = violations
    payload["timestamp"] = _timestamp()
    _emit(payload, args.report)
    return 0 if certified else 1


def _cmd_verify(args) -> int:
    graph = load_graph(args.input)
    cycles = read_cycles(args.cycles)
    if isinstance(graph, Hypergraph3):
        kind, edges_of, all_edges = KIND_TIGHT, cycle_triples, set(graph.edges())
    elif isinstance(graph, Digraph):
        kind, edges_of, all_edges = KIND_DIRECTED, cycle_arcs, set(graph.arcs())
    else:
        raise ValueError("verify needs a 3-graph or digraph input")
    covered = set()
    for cyc in cycles:
        covered.update(edges_of(list(cyc)))
    covered &= all_edges
    result = PackingResult.build(kind, graph.n, cycles, covered, all_edges - covered)
    certified, violations = certify_packing(graph, result)
    payload = {
        "kind": kind,
        "n": graph.n,
        "num_cycles": len(cycles),
        "coverage_fraction": float(result.coverage_fraction),
        "certified": certified,
        "violations": violations,
        "timestamp": _timestamp(),
    }
    _emit(payload, args.report)
    return 0 if certified else 1


def _cmd_diagnose(args) -> int:
    graph = load_graph(args.input)
    size = graph.m if isinstance(graph, BipartiteGraph) else graph.n
    payload: dict = {"n": size, "timestamp": _timestamp()}
    if isinstance(graph, Hypergraph3):
        payload["kind"] = "3graph"
        payload["edges"] = graph.num_edges
        density = graph.num_edges / math.comb(graph.n, 3) if graph.n >= 3 else 0.0
        payload["p_hat"] = density
        payload["eps_hat"] = empirical_pair_eps(graph, density)
        if args.r > 0 and graph.n % 2 == 0:
            pairings = [
                pair_contraction(graph, seed=args.seed, index=i).pairing
                for i in range(args.r)
            ]
            census = condensed_census(
                pairings, mode="sampled", sites=args.sites, seed=args.seed
            )
            payload["condensed_sampled_max"] = census.max_count
            payload["condensed_witness"] = (
                list(census.witness) if census.witness else None
            )
    elif isinstance(graph, Digraph):
        eps_hat, p_hat = empirical_digraph_params(graph)
        payload.update(
            kind="digraph", arcs=graph.num_arcs, eps_hat=eps_hat, p_hat=p_hat
        )
    else:
        eps_hat, p_hat = empirical_bipartite_params(graph)
        payload.update(
            kind="bipartite", edges=graph.num_edges, eps_hat=eps_hat, p_hat=p_hat
        )
    _emit(payload, args.report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tightpack",
        description="Pack uniform hypergraphs and digraphs into Hamilton cycles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    # None means "not given"; main() then falls back to TIGHTPACK_SEED.
    seed_default = None

    g = sub.add_parser("gen", help="generate a random graph file")
    g.add_argument("--kind", choices=("3graph", "digraph", "bipartite"), default="3graph")
    g.add_argument("--n", type=int, required=True, help="vertex count (side size for bipartite)")
    g.add_argument("--p", type=float, required=True)
    g.add_argument("--seed", type=int, default=seed_default)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    c = sub.add_parser("check", help="verify uniformity of a graph file")
    c.add_argument("--input", required=True)
    c.add_argument("--epsilon", type=float, required=True)
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    c.add_argument("--sites", type=int, default=DEFAULT_SITES)
    c.add_argument("--seed", type=int, default=seed_default)
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.add_argument(
        "--catalog",
        choices=("named", "full"),
        default="named",
        help="named: the five pipeline patterns; full: every pattern with t<=7, s<=6",
    )
    c.add_argument("--report")
    c.set_defaults(func=_cmd_check)

    b = sub.add_parser("pack-bipartite", help="pack perfect matchings")
    b.add_argument("--input", required=True)
    b.add_argument("--epsilon", type=float, required=True)
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--out", help="matchings file, numbered sections")
    b.add_argument("--report")
    b.set_defaults(func=_cmd_pack_bipartite)

    for name, fn in (("pack-digraph", _cmd_pack_digraph), ("pack-3graph", _cmd_pack_3graph)):
        s = sub.add_parser(name, help=f"{name.replace('-', ' ')} into Hamilton cycles")
        s.add_argument("--input", required=True)
        s.add_argument("--epsilon", type=float, required=True)
        s.add_argument("--p", type=float, required=True)
        s.add_argument("--seed", type=int, default=seed_default)
        s.add_argument("--profile", choices=("paper", "desk"), default="desk")
        s.add_argument("--rounds-cap", type=int, default=None, dest="rounds_cap")
        s.add_argument("--kappa", type=float, default=None)
        s.add_argument(
            "--r", type=int, default=None, help="cap on constructions per round"
        )
        s.add_argument("--cycles", help="output cycles file, one per line")
        s.add_argument("--report")
        if name == "pack-3graph":
            s.add_argument(
                "--require-div4",
                action="store_true",
                help="reject n not divisible by 4 (always enforced; flag is declarative)",
            )
        s.set_defaults(func=fn)

    v = sub.add_parser("verify", help="certify a cycles file against a graph")
    v.add_argument("--input", required=True)
    v.add_argument("--cycles", required=True)
    v.add_argument("--report")
    v.set_defaults(func=_cmd_verify)

    d = sub.add_parser("diagnose", help="empirical parameters and diagnostics")
    d.add_argument("--input", required=True)
    d.add_argument("--seed", type=int, default=seed_default)
    d.add_argument("--r", type=int, default=0, help="pairings for the condensed census")
    d.add_argument("--sites", type=int, default=DEFAULT_SITES)
    d.add_argument("--report")
    d.set_defaults(func=_cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", None) is None:
            args.seed = _default_seed()
        return args.func(args)
    except EdgeListError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: cannot read {exc.filename}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
