"""End-to-end command-line behavior, run in-process via main()."""

import json

import pytest

from tightpack.cli import main, read_cycles, write_cycles
from tightpack.graphs import Digraph, Hypergraph3, load_graph, save_graph


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv("TIGHTPACK_SEED", raising=False)


def _load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# gen


def test_gen_3graph(tmp_path):
    out = tmp_path / "h.txt"
    assert main(["gen", "--kind", "3graph", "--n", "10", "--p", "0.5",
                 "--seed", "1", "--out", str(out)]) == 0
    g = load_graph(out)
    assert isinstance(g, Hypergraph3)
    assert g.num_edges == 62


def test_gen_digraph_and_bipartite(tmp_path):
    dout = tmp_path / "d.txt"
    bout = tmp_path / "b.txt"
    assert main(["gen", "--kind", "digraph", "--n", "10", "--p", "0.5",
                 "--seed", "1", "--out", str(dout)]) == 0
    assert main(["gen", "--kind", "bipartite", "--n", "10", "--p", "0.5",
                 "--seed", "1", "--out", str(bout)]) == 0
    assert load_graph(dout).num_arcs == 46
    assert load_graph(bout).num_edges == 50


def test_gen_byte_identical(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    args = ["gen", "--n", "12", "--p", "0.4", "--seed", "3"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_bad_p(tmp_path, capsys):
    rc = main(["gen", "--n", "8", "--p", "1.5", "--seed", "0",
               "--out", str(tmp_path / "x.txt")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_bad_subcommand_choice():
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--kind", "tree", "--n", "8", "--p", "0.5", "--out", "x"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# Seed resolution


def test_seed_env_fallback(tmp_path, monkeypatch):
    flagged = tmp_path / "flag.txt"
    env = tmp_path / "env.txt"
    assert main(["gen", "--n", "10", "--p", "0.5", "--seed", "7",
                 "--out", str(flagged)]) == 0
    monkeypatch.setenv("TIGHTPACK_SEED", "7")
    assert main(["gen", "--n", "10", "--p", "0.5", "--out", str(env)]) == 0
    assert flagged.read_bytes() == env.read_bytes()


def test_seed_absent_means_zero(tmp_path):
    zero = tmp_path / "zero.txt"
    plain = tmp_path / "plain.txt"
    assert main(["gen", "--n", "10", "--p", "0.5", "--seed", "0",
                 "--out", str(zero)]) == 0
    assert main(["gen", "--n", "10", "--p", "0.5", "--out", str(plain)]) == 0
    assert zero.read_bytes() == plain.read_bytes()


def test_seed_flag_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv("TIGHTPACK_SEED", "99")
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    assert main(["gen", "--n", "10", "--p", "0.5", "--seed", "1",
                 "--out", str(a)]) == 0
    monkeypatch.delenv("TIGHTPACK_SEED")
    assert main(["gen", "--n", "10", "--p", "0.5", "--seed", "1",
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_env_invalid(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TIGHTPACK_SEED", "banana")
    rc = main(["gen", "--n", "8", "--p", "0.5", "--out", str(tmp_path / "x.txt")])
    assert rc == 2
    assert "TIGHTPACK_SEED" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# check


def test_check_uniform_exit_zero(tmp_path):
    path = tmp_path / "k12.txt"
    save_graph(Hypergraph3.complete(12), path)
    report = tmp_path / "rep.json"
    rc = main(["check", "--input", str(path), "--epsilon", "0.6", "--p", "1.0",
               "--report", str(report)])
    assert rc == 0
    payload = _load(report)
    assert payload["uniform"] is True
    assert sorted(payload) == [
        "epsilon", "mode", "p", "sites_tested", "timestamp", "uniform",
        "witness", "worst_ratio",
    ]


def test_check_nonuniform_exit_one(tmp_path):
    path = tmp_path / "h.txt"
    assert main(["gen", "--n", "12", "--p", "0.8", "--seed", "3",
                 "--out", str(path)]) == 0
    rc = main(["check", "--input", str(path), "--epsilon", "0.5", "--p", "0.8",
               "--report", str(tmp_path / "rep.json")])
    assert rc == 1
    payload = _load(tmp_path / "rep.json")
    assert payload["uniform"] is False
    assert payload["worst_ratio"] == 1.0


def test_check_timestamp_only_variance(tmp_path):
    path = tmp_path / "k12.txt"
    save_graph(Hypergraph3.complete(12), path)
    reps = []
    for name in ("r1.json", "r2.json"):
        rc = main(["check", "--input", str(path), "--epsilon", "0.6",
                   "--p", "1.0", "--report", str(tmp_path / name)])
        assert rc == 0
        payload = _load(tmp_path / name)
        payload.pop("timestamp")
        reps.append(payload)
    assert reps[0] == reps[1]


def test_check_stdout_when_no_report(tmp_path, capsys):
    path = tmp_path / "k12.txt"
    save_graph(Hypergraph3.complete(12), path)
    rc = main(["check", "--input", str(path), "--epsilon", "0.6", "--p", "1.0"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["uniform"] is True


def test_check_budget_exceeded(tmp_path, capsys):
    path = tmp_path / "h30.txt"
    assert main(["gen", "--n", "30", "--p", "0.5", "--seed", "0",
                 "--out", str(path)]) == 0
    rc = main(["check", "--input", str(path), "--epsilon", "0.5", "--p", "0.5",
               "--mode", "exhaustive", "--budget", "1000000"])
    assert rc == 2
    assert "budget" in capsys.readouterr().err


def test_check_full_catalog_small(tmp_path):
    path = tmp_path / "h5.txt"
    save_graph(Hypergraph3.complete(5), path)
    # At n=5 every t>5 pattern is vacuous, so the sweep stays small: the
    # 923 placeable patterns cover 109965 anchor tuples.  Each t=5 pattern
    # has no extension vertex left, giving a worst ratio of exactly 1.
    rc = main(["check", "--input", str(path), "--epsilon", "1.5", "--p", "1.0",
               "--catalog", "full", "--mode", "exhaustive",
               "--report", str(tmp_path / "rep.json")])
    assert rc == 0
    payload = _load(tmp_path / "rep.json")
    assert payload["uniform"] is True
    assert payload["worst_ratio"] == 1.0
    assert payload["sites_tested"] == 109965


# ---------------------------------------------------------------------------
# pack-bipartite


def test_pack_bipartite(tmp_path):
    path = tmp_path / "b.txt"
    assert main(["gen", "--kind", "bipartite", "--n", "12", "--p", "0.6",
                 "--seed", "5", "--out", str(path)]) == 0
    out = tmp_path / "matchings.txt"
    report = tmp_path / "rep.json"
    rc = main(["pack-bipartite", "--input", str(path), "--epsilon", "0.3",
               "--p", "0.6", "--out", str(out), "--report", str(report)])
    assert rc == 0
    payload = _load(report)
    assert payload["k"] == 4
    assert payload["m"] == 12
    assert payload["analytic_k"] == 0
    assert abs(payload["leftover_fraction"] - 43 / 91) < 1e-12
    text = out.read_text()
    assert "# matching 0" in text and "# matching 3" in text


def test_pack_bipartite_wrong_kind(tmp_path, capsys):
    path = tmp_path / "d.txt"
    save_graph(Digraph.complete(4), path)
    rc = main(["pack-bipartite", "--input", str(path), "--epsilon", "0.3",
               "--p", "0.5"])
    assert rc == 2
    assert "bipartite" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# pack-digraph / pack-3graph / verify


def test_pack_digraph_roundtrip(tmp_path):
    path = tmp_path / "d8.txt"
    save_graph(Digraph.complete(8), path)
    cycles = tmp_path / "cycles.txt"
    report = tmp_path / "rep.json"
    rc = main(["pack-digraph", "--input", str(path), "--epsilon", "0.2",
               "--p", "0.99", "--seed", "0", "--kappa", "1", "--r", "4",
               "--rounds-cap", "3", "--cycles", str(cycles),
               "--report", str(report)])
    assert rc == 0
    payload = _load(report)
    assert payload["certified"] is True
    assert payload["violations"] == []
    assert payload["cycles"] == 3
    assert payload["covered_arcs"] == 24
    parsed = read_cycles(str(cycles))
    assert len(parsed) == 3
    assert all(len(c) == 8 for c in parsed)
    assert main(["verify", "--input", str(path), "--cycles", str(cycles)]) == 0


def test_pack_digraph_tampered_cycles(tmp_path):
    path = tmp_path / "d8.txt"
    save_graph(Digraph.complete(8), path)
    cycles = tmp_path / "cycles.txt"
    assert main(["pack-digraph", "--input", str(path), "--epsilon", "0.2",
                 "--p", "0.99", "--seed", "0", "--kappa", "1",
                 "--rounds-cap", "2", "--cycles", str(cycles)]) == 0
    parsed = read_cycles(str(cycles))
    assert parsed
    # Duplicate one cycle so its arcs are claimed twice.
    write_cycles(str(cycles), parsed + [parsed[0]])
    report = tmp_path / "rep.json"
    rc = main(["verify", "--input", str(path), "--cycles", str(cycles),
               "--report", str(report)])
    assert rc == 1
    assert any("reuses" in v for v in _load(report)["violations"])


def test_verify_rejects_vertex_swap(tmp_path):
    # Swapping two vertices in a sparse digraph's cycle breaks an arc.
    D = Digraph(6, [(i, (i + 1) % 6) for i in range(6)])
    path = tmp_path / "c6.txt"
    save_graph(D, path)
    cycles = tmp_path / "cycles.txt"
    write_cycles(str(cycles), [(0, 1, 2, 3, 4, 5)])
    assert main(["verify", "--input", str(path), "--cycles", str(cycles)]) == 0
    write_cycles(str(cycles), [(0, 2, 1, 3, 4, 5)])
    assert main(["verify", "--input", str(path), "--cycles", str(cycles)]) == 1


def test_pack_3graph_roundtrip(tmp_path):
    path = tmp_path / "h8.txt"
    save_graph(Hypergraph3.complete(8), path)
    cycles = tmp_path / "cycles.txt"
    report = tmp_path / "rep.json"
    rc = main(["pack-3graph", "--input", str(path), "--epsilon", "0.2",
               "--p", "0.99", "--seed", "0", "--kappa", "1", "--r", "2",
               "--rounds-cap", "8", "--require-div4", "--cycles", str(cycles),
               "--report", str(report)])
    assert rc == 0
    payload = _load(report)
    assert payload["certified"] is True
    assert payload["cycles"] == 3
    assert payload["covered_edges"] == 24
    assert main(["verify", "--input", str(path), "--cycles", str(cycles)]) == 0


def test_pack_3graph_rejects_n_not_div4(tmp_path, capsys):
    path = tmp_path / "h10.txt"
    save_graph(Hypergraph3.complete(10), path)
    rc = main(["pack-3graph", "--input", str(path), "--epsilon", "0.3",
               "--p", "0.5"])
    assert rc == 2
    assert "divisible by 4" in capsys.readouterr().err


def test_pack_digraph_rejects_odd_n(tmp_path, capsys):
    path = tmp_path / "d7.txt"
    save_graph(Digraph.complete(7), path)
    rc = main(["pack-digraph", "--input", str(path), "--epsilon", "0.3",
               "--p", "0.5"])
    assert rc == 2
    assert "even" in capsys.readouterr().err


def test_pack_empty_graph(tmp_path):
    path = tmp_path / "empty.txt"
    save_graph(Digraph(8), path)
    report = tmp_path / "rep.json"
    rc = main(["pack-digraph", "--input", str(path), "--epsilon", "0.3",
               "--p", "0.5", "--report", str(report)])
    assert rc == 0
    payload = _load(report)
    assert payload["cycles"] == 0
    assert payload["certified"] is True


def test_pack_paper_profile_forbids_overrides(tmp_path, capsys):
    path = tmp_path / "d8.txt"
    save_graph(Digraph(8), path)
    rc = main(["pack-digraph", "--input", str(path), "--epsilon", "0.3",
               "--p", "0.5", "--profile", "paper", "--kappa", "2"])
    assert rc == 2
    assert "paper profile" in capsys.readouterr().err


def test_verify_bipartite_rejected(tmp_path, capsys):
    path = tmp_path / "b.txt"
    assert main(["gen", "--kind", "bipartite", "--n", "4", "--p", "0.5",
                 "--seed", "0", "--out", str(path)]) == 0
    cycles = tmp_path / "cycles.txt"
    cycles.write_text("0 1 2 3\n")
    rc = main(["verify", "--input", str(path), "--cycles", str(cycles)])
    assert rc == 2
    assert "verify needs" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# diagnose


def test_diagnose_3graph_with_census(tmp_path):
    path = tmp_path / "h.txt"
    assert main(["gen", "--n", "12", "--p", "0.7", "--seed", "2",
                 "--out", str(path)]) == 0
    report = tmp_path / "rep.json"
    rc = main(["diagnose", "--input", str(path), "--r", "3", "--sites", "200",
               "--seed", "0", "--report", str(report)])
    assert rc == 0
    payload = _load(report)
    assert payload["kind"] == "3graph"
    assert payload["edges"] == load_graph(path).num_edges
    assert 0 < payload["p_hat"] < 1
    assert payload["condensed_sampled_max"] >= 0
    assert len(payload["condensed_witness"]) == 4


def test_diagnose_digraph(tmp_path):
    path = tmp_path / "d.txt"
    save_graph(Digraph.complete(10), path)
    report = tmp_path / "rep.json"
    assert main(["diagnose", "--input", str(path), "--report", str(report)]) == 0
    payload = _load(report)
    assert payload["kind"] == "digraph"
    assert payload["p_hat"] == 1.0
    assert abs(payload["eps_hat"] - 0.1) < 1e-12


def test_diagnose_bipartite(tmp_path):
    path = tmp_path / "b.txt"
    assert main(["gen", "--kind", "bipartite", "--n", "8", "--p", "0.5",
                 "--seed", "1", "--out", str(path)]) == 0
    report = tmp_path / "rep.json"
    assert main(["diagnose", "--input", str(path), "--report", str(report)]) == 0
    assert _load(report)["kind"] == "bipartite"


# ---------------------------------------------------------------------------
# Error handling


def test_missing_file(tmp_path, capsys):
    rc = main(["check", "--input", str(tmp_path / "nope.txt"),
               "--epsilon", "0.5", "--p", "0.5"])
    assert rc == 2
    assert "cannot read" in capsys.readouterr().err


def test_malformed_file_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("format=digraph n=4\n0 1\n0 9\n")
    rc = main(["diagnose", "--input", str(path)])
    assert rc == 2
    assert "line 3" in capsys.readouterr().err


def test_cycles_file_parse_error(tmp_path, capsys):
    path = tmp_path / "d.txt"
    save_graph(Digraph.complete(4), path)
    cycles = tmp_path / "cycles.txt"
    cycles.write_text("0 1 x 3\n")
    rc = main(["verify", "--input", str(path), "--cycles", str(cycles)])
    assert rc == 2
    assert "vertex sequence" in capsys.readouterr().err


def test_cycles_file_comments(tmp_path):
    path = tmp_path / "cycles.txt"
    path.write_text("# header comment\n\n0 1 2 3  # trailing\n")
    assert read_cycles(str(path)) == [(0, 1, 2, 3)]
