import json

import numpy as np
import pytest

import ktree_lab as kl
from ktree_lab import io
from ktree_lab.cli import main


def test_generate_edge_list(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert main(["generate", "--k", "2", "--n", "1000", "--seed", "7", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1998  # header + 3 + 2*997 edges
    assert lines[0] == "# ktree k=2 n=1000 seed=7"
    assert "1997 edges" in capsys.readouterr().out


def test_generate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        assert main(["generate", "--k", "3", "--n", "500", "--seed", "9", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_with_decomposition(tmp_path):
    out, td = tmp_path / "g.txt", tmp_path / "g.td"
    assert main(["generate", "--k", "2", "--n", "4", "--seed", "1",
                 "--out", str(out), "--td", str(td)]) == 0
    lines = td.read_text().splitlines()
    assert lines[0] == "s td 2 3 4"


def test_generate_partial_flag(tmp_path):
    out = tmp_path / "p.txt"
    assert main(["generate", "--k", "4", "--n", "100", "--seed", "2",
                 "--out", str(out), "--partial-b", "0.5"]) == 0
    graph = io.read_edge_list(out)
    assert graph.b == 0.5
    assert len(graph.edges) == 10 + 2 * 95


def test_generate_usage_errors(tmp_path):
    assert main(["generate", "--k", "1", "--n", "10", "--seed", "0",
                 "--out", str(tmp_path / "x")]) == 1
    assert main(["generate", "--k", "2", "--n", "10", "--seed", "0"]) == 1  # missing --out
    assert main(["generate", "--k", "2", "--n", "10", "--seed", "0",
                 "--out", str(tmp_path / "y"), "--partial-b", "1.5"]) == 1


def test_generate_io_error(tmp_path):
    assert main(["generate", "--k", "2", "--n", "10", "--seed", "0",
                 "--out", str(tmp_path / "missing-dir" / "g.txt")]) == 2


def test_theory_stdout(capsys):
    assert main(["theory", "--k", "2", "--dmax", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1] == "d,beta,closed_form"
    betas = [ln.split(",")[1] for ln in out[2:]]
    assert betas == ["0.5", "0.2", "0.1", "0.0571428571429"]


def test_theory_json_gamma(tmp_path):
    path = tmp_path / "t.json"
    assert main(["theory", "--k", "3", "--dmax", "3", "--json", str(path)]) == 0
    assert json.loads(path.read_text())["meta"]["gamma"] == 2.5


def test_theory_rejects_k1():
    assert main(["theory", "--k", "1", "--dmax", "5"]) == 1


def test_theory_with_dp_column(tmp_path):
    path = tmp_path / "t.csv"
    assert main(["theory", "--k", "2", "--dmax", "300", "--n", "2000", "--out", str(path)]) == 0
    assert path.read_text().splitlines()[1] == "d,beta,closed_form,expected_dp"


def test_theory_surfaces_dmax_too_small(tmp_path, capsys):
    # a 30-row table truncates too much expected mass at n=2000
    assert main(["theory", "--k", "2", "--dmax", "30", "--n", "2000",
                 "--out", str(tmp_path / "t.csv")]) == 1
    assert "overflow mass" in capsys.readouterr().err


def test_analyze_round_trips_the_histogram(tmp_path):
    edge_file = tmp_path / "g.txt"
    assert main(["generate", "--k", "2", "--n", "3000", "--seed", "13", "--out", str(edge_file)]) == 0
    assert main(["analyze", "--input", str(edge_file), "--out-prefix", str(tmp_path / "r")]) == 0

    hist_in_process = kl.degree_histogram(kl.generate(kl.ProcessParams(k=2, n=3000, seed=13)))
    rows = (tmp_path / "r.histogram.csv").read_text().splitlines()[2:]
    from_file = {int(d): int(c) for d, c in (row.split(",") for row in rows)}
    assert from_file == hist_in_process.counts


def test_analyze_generates_in_process(tmp_path):
    prefix = tmp_path / "m"
    assert main(["analyze", "--k", "2", "--n", "5000", "--seed", "3",
                 "--out-prefix", str(prefix)]) == 0
    fit = json.loads((tmp_path / "m.fit.json").read_text())
    assert 2 < fit["gamma_hat"] < 4
    dev = (tmp_path / "m.deviation.csv").read_text().splitlines()
    assert dev[1] == "d,empirical_fraction,beta,abs_error,rel_error"


def test_analyze_small_graph_reports_short_tail(tmp_path):
    prefix = tmp_path / "s"
    assert main(["analyze", "--k", "2", "--n", "20", "--seed", "3",
                 "--out-prefix", str(prefix)]) == 0
    fit = json.loads((tmp_path / "s.fit.json").read_text())
    assert fit.get("insufficient_tail") is True


def test_analyze_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("# ktree k=2 n=5 seed=1\n0 1\n0 two\n")
    assert main(["analyze", "--input", str(bad), "--out-prefix", str(tmp_path / "x")]) == 2
    assert ":3:" in capsys.readouterr().err


def test_analyze_in_process_needs_n_and_seed(tmp_path):
    assert main(["analyze", "--k", "2", "--out-prefix", str(tmp_path / "x")]) == 1


def test_concentration_json_output(tmp_path):
    path = tmp_path / "c.json"
    assert main(["concentration", "--k", "2", "--n", "10000", "--d", "2",
                 "--trials", "50", "--seed", "3", "--out", str(path)]) == 0
    data = json.loads(path.read_text())
    assert data["violations"] == 0
    assert data["meta"]["n"] == 10000 and data["d"] == 2


def test_concentration_default_degree_is_k(capsys):
    assert main(["concentration", "--k", "3", "--n", "200", "--trials", "5", "--seed", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["d"] == 3


def test_concentration_rejects_single_trial():
    assert main(["concentration", "--k", "2", "--n", "100", "--trials", "1", "--seed", "1"]) == 1


def test_failed_structural_check_exits_3(tmp_path, monkeypatch, capsys):
    # a failing structural check on generated output means a generator bug
    from ktree_lab import analysis
    from ktree_lab.analysis import Lemma1Report

    monkeypatch.setattr(
        analysis, "verify_lemma1", lambda graph, k=None: Lemma1Report(False, "forced failure")
    )
    assert main(["analyze", "--k", "2", "--n", "100", "--seed", "1",
                 "--out-prefix", str(tmp_path / "x")]) == 3
    assert "forced failure" in capsys.readouterr().err


def test_unknown_command_is_usage_error(capsys):
    assert main(["frobnicate"]) == 1
    capsys.readouterr()
