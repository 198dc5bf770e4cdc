import json

import pytest

from qbdpoly.cli import main

PJ = ["--family", "product-jacobi", "--alpha", "0.5", "--beta", "0.5",
      "--gamma", "0.2", "--delta", "0.3", "--tau", "0.4"]
T01 = ["--family", "triangle01", "--alpha", "0.5", "--beta", "0.2",
       "--gamma", "0.3", "--tau", "0.25"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_families_lists_all(capsys):
    code, out = run(capsys, "families")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["families"]) == 5


def test_families_with_bounds(capsys):
    code, out = run(capsys, "families", *T01)
    assert code == 0
    doc = json.loads(out)
    assert doc["families"][0]["tau"]["form"] == "interval"


def test_build_json_and_csv(capsys):
    code, out = run(capsys, "build", *T01, "-N", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["size"] == 10
    assert len(doc["entries"]) == 100
    assert doc["index_map"][0] == [0, 0]
    code, out = run(capsys, "build", *T01, "-N", "3", "--format", "csv")
    assert code == 0
    assert out.startswith("# N=3")
    assert len(out.strip().splitlines()) == 11


def test_validate_pass(capsys):
    code, out = run(capsys, "validate", *PJ, "-N", "5")
    assert code == 0
    assert json.loads(out)["pass"] is True


def test_invariant(capsys):
    code, out = run(capsys, "invariant", *T01, "-N", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["stationarity_residual"] < 1e-10
    assert len(doc["blocks"]) == 5


def test_transition_and_simulate(capsys):
    code, out = run(capsys, "transition", *PJ, "--from", "1", "0",
                    "--to", "2", "1", "--steps", "3", "-N", "8")
    assert code == 0
    p = json.loads(out)["probability"]
    code, out = run(capsys, "simulate", *PJ, "--from", "1", "0", "--to", "2", "1",
                    "--steps", "3", "--paths", "50000", "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["estimate"] - p) < 4 * doc["stderr"]


def test_classify(capsys):
    code, out = run(capsys, "classify", *PJ)
    assert code == 0
    assert json.loads(out)["verdict"] in ("transient", "null-recurrent")


def test_factorize(capsys):
    code, out = run(capsys, "factorize", *T01, "-N", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["lu"]["pass"] is True
    assert doc["urn_consistency"]["pass"] is True


def test_diagram_dot(capsys):
    code, out = run(capsys, "diagram", *PJ, "-N", "2", "--precision", "3")
    assert code == 0
    assert out.startswith("digraph")
    assert "0_0 ->" in out
    assert '1_1 [label="(1,1)"]' in out


def test_exit_code_usage(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "build", "--family", "triangle01", "--tau", "0.1")[0] == 2
    assert run(capsys, "build", *T01[:-2])[0] == 2  # missing --tau


def test_exit_code_domain(capsys):
    code, out = run(capsys, "build", "--family", "triangle01", "--alpha", "0.5",
                    "--beta", "0.2", "--gamma", "0.3", "--tau", "0.9", "-N", "3")
    assert code == 3
    assert json.loads(out)["error"] == "domain"


def test_output_file_written_atomically(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, _ = run(capsys, "build", *T01, "-N", "2", "--output", str(target))
    assert code == 0
    doc = json.loads(target.read_text())
    assert doc["size"] == 6
    assert list(tmp_path.iterdir()) == [target]  # no temp file left behind
