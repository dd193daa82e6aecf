from __future__ import annotations

import json

import pytest

from localdist.cli import main
from localdist.io import load_povm


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def files(tmp_path):
    assert run("gen", "sic2", "--out", tmp_path / "sic.json") == 0
    assert run("gen", "qutrit-psic", "--s", "1,1,-2", "--out", tmp_path / "q.json") == 0
    return tmp_path


def test_gen_is_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run("gen", "random", "--dim", 3, "--outcomes", 9, "--seed", 7, "--out", tmp_path / f"{name}.json") == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_gen_kinds(tmp_path):
    assert run("gen", "dim4-vpsic", "--out", tmp_path / "v.json") == 0
    assert load_povm(tmp_path / "v.json").dim == 4
    basis = {"basis": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]], [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]]}
    (tmp_path / "basis.json").write_text(json.dumps(basis))
    assert run("gen", "from-span", "--basis", tmp_path / "basis.json", "--out", tmp_path / "fs.json") == 0
    assert load_povm(tmp_path / "fs.json").n_outcomes == 2
    assert run("gen", "random", "--out", tmp_path / "x.json") == 1
    assert run("gen", "qutrit-psic", "--s", "1,1,1", "--out", tmp_path / "x.json") == 1


def test_validate(files, tmp_path):
    assert run("validate", files / "sic.json", "--out", tmp_path / "r.json") == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["valid"] and doc["tool_version"]
    bad = {"dim": 1, "effects": [[[[0.5, 0]]]]}
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    assert run("validate", tmp_path / "bad.json") == 1


def test_certify_exit_codes(files, tmp_path):
    assert run("certify", files / "sic.json", "--property", "psic", "--out", tmp_path / "c.json") == 0
    doc = json.loads((tmp_path / "c.json").read_text())
    assert doc["holds"] == "yes" and doc["strength"] == "exact"
    assert doc["seed"] == 0 and doc["trials"] == 64 and doc["tol"] == 1e-8
    assert run("certify", files / "q.json", "--property", "psic") == 0
    assert run("certify", files / "q.json", "--property", "vpsic", "--out", tmp_path / "v.json") == 2
    doc = json.loads((tmp_path / "v.json").read_text())
    assert len(doc["witnesses"]) == 2 and doc["witness_distance"] <= 1e-9
    assert run("certify", files / "q.json", "--property", "ic") == 2


def test_certify_invalid_input(tmp_path):
    assert run("certify", tmp_path / "nothing.json") == 1
    (tmp_path / "bad.json").write_text(json.dumps({"dim": 1, "effects": [[[[0.5, 0]]]]}))
    assert run("certify", tmp_path / "bad.json") == 1


def test_tensor(files, tmp_path):
    assert run("tensor", files / "sic.json", files / "q.json", "--out", tmp_path / "t.json") == 0
    t = load_povm(tmp_path / "t.json")
    assert (t.dim, t.n_outcomes) == (6, 32)
    assert t.metadata["factors"][1]["metadata"]["kind"] == "qutrit-psic"
    assert run("certify", tmp_path / "t.json", "--property", "psic") == 0


def test_check_exit_codes(tmp_path):
    assert run("check", "2", "--db", 3, "--seed", 1, "--pairs", 500, "--out", tmp_path / "k.json") == 0
    doc = json.loads((tmp_path / "k.json").read_text())
    assert doc["proposition"] == "2" and doc["seed"] == 1 and doc["verdict"] == "consistent"
    assert all({"name", "pass", "margin"} <= set(c) for c in doc["checks"])
    assert run("check", "multi", "--factors", "2,3", "--seed", 4, "--pairs", 500, "--out", tmp_path / "m.json") == 0
    assert run("check", "1", "--corrupt-b", "--pairs", 500, "--out", tmp_path / "w.json") == 2
    assert "witnesses" in json.loads((tmp_path / "w.json").read_text())
    assert run("check", "multi", "--factors", "3,3,3,3") == 1
    assert run("check", "unitaries", "--out", tmp_path / "u.json") == 0


def test_usage_errors():
    assert run("bogus") == 1
    assert run("certify") == 1
    assert run("--version") == 0


def test_reconstruct(files, tmp_path):
    assert run("gen", "random", "--dim", 3, "--outcomes", 12, "--seed", 1, "--out", tmp_path / "ic.json") == 0
    assert run("simulate", tmp_path / "ic.json", "--random", "mixed", "--seed", 2,
               "--state-out", tmp_path / "rho.json", "--out", tmp_path / "p.json") == 0
    assert run("reconstruct", tmp_path / "ic.json", tmp_path / "p.json", "--reference", tmp_path / "rho.json",
               "--out", tmp_path / "r.json") == 0
    assert json.loads((tmp_path / "r.json").read_text())["recovery_error"] <= 1e-8

    assert run("simulate", files / "q.json", "--random", "pure", "--seed", 3,
               "--state-out", tmp_path / "psi.json", "--out", tmp_path / "pp.json") == 0
    assert run("reconstruct", files / "q.json", tmp_path / "pp.json", "--mode", "pure",
               "--reference", tmp_path / "psi.json", "--out", tmp_path / "rp.json") == 0
    doc = json.loads((tmp_path / "rp.json").read_text())
    assert doc["fidelity_overlap"] >= 1 - 1e-6

    assert run("reconstruct", files / "sic.json", tmp_path / "pp.json") == 1


def test_stdout_json_when_no_out(files, capsys):
    assert run("certify", files / "sic.json") == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["holds"] == "yes"
    assert "PSIC" in captured.err
