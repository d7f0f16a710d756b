from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import DATA
from utrp.cli import main
from utrp.io import loads_net
from utrp.petri import full_run_language

CREDIT = str(DATA / "credit_card_log.json")
VALID = str(DATA / "validation_log.json")
MODEL = str(DATA / "fraud_model.json")


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_realizations_certain_ordered_trace(tmp_path, capsys):
    path = tmp_path / "log.json"
    path.write_text(json.dumps({"traces": [{"case": "x", "events": [
        {"id": "a1", "activity": "a", "timestamp": "2021-01-01T10:00"},
        {"id": "a2", "activity": "b", "timestamp": "2021-01-01T11:00"},
    ]}]}))
    code, out, _ = run(capsys, "realizations", str(path), "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert rows[0]["sequence"] == "a,b" and float(rows[0]["probability"]) == 1.0


def test_realizations_csv_sums_to_one(capsys):
    code, out, _ = run(capsys, "realizations", CREDIT, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 12
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-6)


def test_realizations_text_and_precision(capsys):
    code, out, _ = run(capsys, "realizations", VALID, "--precision", "2")
    assert code == 0
    assert "<a,b,e>" in out and "0.72" in out and "0.720" not in out


def test_order_realizations(capsys):
    code, out, _ = run(capsys, "order-realizations", CREDIT, "--case", "5167", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["order_realizations"]) == 6
    assert sum(r["probability"] for r in doc["order_realizations"]) == pytest.approx(1.0, abs=1e-6)


def test_behavior_graph_export(tmp_path, capsys):
    out = tmp_path / "g.dot"
    code, _, _ = run(capsys, "behavior-graph", VALID, "--case", "validation", "--out", str(out), "--dot")
    assert code == 0
    assert '"e1" -> "e2";' in out.read_text()


def test_behavior_net_export_is_loadable(tmp_path, capsys):
    out = tmp_path / "net.json"
    code, _, _ = run(capsys, "behavior-net", VALID, "--case", "validation", "--out", str(out))
    assert code == 0
    net = loads_net(out.read_text())
    assert len(full_run_language(net)) == 6
    assert json.loads(out.read_text())["weights"]["(e3,ε)"] == pytest.approx(0.8)


def test_expected_conformance_report(capsys):
    code, out, _ = run(capsys, "expected-conformance", CREDIT, MODEL)
    assert code == 0
    assert "min 0" in out and "max 3" in out and "expected 2.202381" in out


def test_simulate_outputs(tmp_path, capsys):
    conv, svg = tmp_path / "c.csv", tmp_path / "c.svg"
    args = ["simulate", VALID, "--case", "validation", "-n", "2000", "--seed", "3",
            "--convergence", str(conv), "--svg", str(svg), "--format", "json"]
    code, out, _ = run(capsys, *args)
    assert code == 0
    assert sum(r["frequency"] for r in json.loads(out)["frequencies"]) == pytest.approx(1.0)
    assert conv.read_text().startswith("run_index,sequence,frequency")
    assert svg.read_text().lstrip().startswith("<svg") and "polyline" in svg.read_text()
    # Same seed, same output.
    _, again, _ = run(capsys, *args)
    assert again == out


def test_validate_large_n(capsys):
    code, out, _ = run(capsys, "validate", VALID, "--case", "validation", "-n", "100000", "--seed", "0",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_deviation_generative"] <= 0.005
    assert len(doc["rows"]) == 6


def test_missing_case_is_an_error(capsys):
    code, _, err = run(capsys, "order-realizations", CREDIT, "--case", "nope", "--format", "json")
    assert code == 1
    assert json.loads(err)["error"] == "UtrpError"


def test_parse_error_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"traces": [')
    code, _, err = run(capsys, "realizations", str(bad), "--format", "json")
    assert code == 1
    assert json.loads(err)["error"] == "ParseError"


def test_cap_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("UTRP_CAP", "4")
    code, _, err = run(capsys, "realizations", CREDIT, "--format", "json")
    assert code == 1
    assert json.loads(err)["error"] == "CapExceeded"


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "utrp.cli", "realizations", VALID, "--format", "csv"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.count("\n") == 7
