from __future__ import annotations

import json

import pytest

from ech_s1s2.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_orbits_round_form(capsys):
    code, out, _ = run(capsys, "orbits", "--cutoff", "10")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["families"]) == 5
    assert doc["winding_bound"] == 2


def test_orbits_below_first_family(capsys):
    code, out, _ = run(capsys, "orbits", "--cutoff", "1")
    doc = json.loads(out)
    assert code == 0 and doc["families"] == []
    assert len(doc["exceptional"]) == 2


def test_json_output_is_byte_stable(capsys):
    first = run(capsys, "perturb", "--rho", "10", "--epsilon", "1/20", "--cutoff", "12", "--delta", "0.01")[1]
    second = run(capsys, "perturb", "--rho", "10", "--epsilon", "1/20", "--cutoff", "12", "--delta", "0.01")[1]
    assert first == second and first.endswith("\n")


def test_perturb_reports_vanishing_modifier(capsys):
    code, out, _ = run(capsys, "perturb", "--rho", "10", "--cutoff", "12", "--epsilon", "sqrt(3/2)", "--c", "0", "--delta", "0.01")
    doc = json.loads(out)
    assert code == 1
    assert doc["modifier_zero"] and doc["modifier"] == []
    assert "c >" in doc["error"]


def test_bad_profile_is_input_error(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text('{"base": "bogus"}')
    code, _, err = run(capsys, "orbits", "--profile", str(path), "--cutoff", "5")
    assert code == 2 and "bogus" in err


def test_generators_from_catalog(capsys, tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"orbits": [
        {"name": "e", "kind": "elliptic", "action": "1", "homology_class": 1, "rotation": "1/10"},
        {"name": "h", "kind": "positive-hyperbolic", "action": "6/5", "homology_class": 1},
        {"name": "e0", "kind": "elliptic", "action": "1/2", "homology_class": 0, "rotation": "1/10"},
    ]}))
    code, out, _ = run(capsys, "generators", "--catalog", str(path), "--gamma", "1", "--cutoff", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["dimensions"] == {"0": 4, "1": 4}
    assert len(doc["generators"]) == 8


def test_weights_and_manifold(capsys, tmp_path):
    w = tmp_path / "w.json"
    w.write_text(json.dumps({"components": [{"index": 0, "kind": "special-plane", "multiplicity": 3}]}))
    code, out, _ = run(capsys, "weights", "--curves", str(w))
    assert code == 0 and json.loads(out)["total_weight"] == 1
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"chi": 3, "sigma": 1, "b1": 0, "b2_plus": 1, "n_untwisted": 2, "spin_c": {"s": 9}}))
    code, out, _ = run(capsys, "manifold", "--curves", str(m))
    doc = json.loads(out)
    assert code == 0 and doc["spin_c_dimensions"] == {"s": 0}


def test_table_format_and_out_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "orbits", "--cutoff", "10", "--format", "table", "--out", str(target))
    assert code == 0
    text = target.read_text()
    assert "winding_bound: 2" in text


def test_paper_checks_subset_and_override(capsys):
    code, out, _ = run(capsys, "paper-checks", "--only", "3", "4", "--format", "table")
    assert code == 0 and out.count("[PASS]") >= 2
    code, out, _ = run(capsys, "paper-checks", "--only", "3", "--plane-rotation", "3/10", "--format", "table")
    assert code == 1 and "[FAIL]" in out


def test_missing_subcommand_exits():
    with pytest.raises(SystemExit):
        main([])
