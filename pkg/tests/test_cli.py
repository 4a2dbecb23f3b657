from __future__ import annotations

import json
from pathlib import Path

import pytest

from realtheta.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = sorted(p for p in FIXTURES.glob("*.json") if (FIXTURES / (p.stem + ".tsv")).exists())


def _command(config: Path) -> str:
    return json.loads(config.read_text())["command"]


@pytest.mark.parametrize("config", GOLDEN, ids=lambda p: p.stem)
def test_golden_tsv(config, capsys):
    assert main([_command(config), "--config", str(config)]) == 0
    assert capsys.readouterr().out == (FIXTURES / (config.stem + ".tsv")).read_text()


def test_golden_json(capsys):
    config = FIXTURES / "symmetric_power_120_d3.json"
    assert main(["orientability", "--config", str(config), "--format", "json"]) == 0
    assert capsys.readouterr().out == (FIXTURES / "symmetric_power_120_d3.out.json").read_text()


def test_output_is_deterministic(capsys):
    args = ["holonomy-check", "--config", str(FIXTURES / "holonomy_unit_cell.json")]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_every_row_has_provenance(capsys):
    main(["theta-table", "--g", "2", "--r", "3", "--a", "0"])
    rows = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert rows[0] == "section\titem\tvalue\tprovenance"
    assert all(len(r.split("\t")) == 4 and r.split("\t")[3] for r in rows[1:])


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "orientability", "parameters": {"g": 1, "r": 2, "a": 0, "d": 3}}))
    assert main(["orientability", "--config", str(cfg), "--d", "4"]) == 0
    out = capsys.readouterr().out
    assert "# d\t4" in out
    assert "T1\torientable\ttrue" in out


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert main(["classify-curve", "--g", "1", "--r", "2", "--a", "0", "--d", "1", "--format", "json", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(target.read_text())
    assert doc["status"] == "ok"
    assert {r["item"] for r in doc["rows"] if r["section"] == "class"} >= {"10", "01"}


@pytest.mark.parametrize(
    "argv",
    [
        ["classify-torus", "--tau", "[[1,1],[0,1]]"],
        ["classify-torus", "--tau", "[[1,0],[0,-1]]", "--u", "[[0,1],[1,0]]"],
        ["classify-torus", "--tau", "[[0,1],[1,0]]", "--u", "[[0,1],[-1,0]]", "--w0", "[0]"],
        ["classify-curve", "--g", "1", "--r", "1", "--a", "0"],
        ["classify-curve", "--g", "1", "--r", "2", "--a", "0", "--d", "1", "--w", "[1,1]"],
        ["orientability", "--g", "3", "--r", "2", "--a", "0", "--d", "2"],
        ["orientability", "--g", "1", "--r", "2", "--a", "0", "--d", "3", "--p0-circle", "5"],
        ["holonomy-check", "--u", "[[0,1],[-1,0]]", "--angles", "[0]"],
        ["verify", "--suite", "nope"],
        ["theta-table", "--g", "2"],
    ],
)
def test_invalid_input_exit_code(argv, capsys):
    assert main(argv) == 2
    assert "invalid input" in capsys.readouterr().err


def test_config_for_other_command(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "verify", "parameters": {}}))
    assert main(["theta-table", "--config", str(cfg)]) == 2


def test_unreadable_config(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_verify_passing_suite(capsys):
    assert main(["verify", "--suite", "symmetric-power-table"]) == 0
    assert "# status\tok" in capsys.readouterr().out


def test_verify_reports_property_failure(capsys):
    # the unrestricted realizability statement fails for non-separating types
    assert main(["verify", "--suite", "theta-realizability"]) == 1
    out = capsys.readouterr().out
    assert "(1,1,1) all refinements: parity set, uniform multiplicity\tFAIL" in out
    assert "(1,1,1) Real refinements: parity set, 2^g each\tpass" in out
