from __future__ import annotations

import json
import shutil
import subprocess
import sys
from dataclasses import replace

import pytest

import joindeg.analysis as analysis
from joindeg import cli
from joindeg.analysis import scrub_timing
from joindeg.errors import NonIntegralRatio
from joindeg.instances import bundled_names, bundled_path


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    assert out.split() == bundled_names()
    assert len(bundled_names()) >= 10


def test_analyze_skew_lines(capsys):
    code, doc, _ = run_json(capsys, "analyze", "skew-lines")
    assert code == 0
    assert doc["schema"] == 1 and doc["tool"]["name"] == "joindeg"
    s = doc["summary"]
    assert (s["m_X"], s["m_Y"], s["b"], s["deg_pi"], s["deg_EJ"], s["t"]) == (1, 1, 1, 1, 1, -1)
    assert s["strange"] is False and s["constrained"] is False


def test_analyze_twisted_cubic_from_path(capsys):
    code, doc, _ = run_json(capsys, "analyze", str(bundled_path("twisted-cubic-secant")))
    assert code == 0
    s = doc["summary"]
    assert (s["m_X"], s["m_Y"], s["b"], s["deg_pi"], s["dim_EJ"]) == (2, 2, 1, 4, 3)


def test_analyze_json_out(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "analyze", "skew-lines", "--json-out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert json.loads(stdout) == doc["summary"]


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 1 and "malformed JSON" in err


def test_schema_error_names_key(capsys, tmp_path):
    doc = json.loads(bundled_path("skew-lines").read_text())
    doc["colour"] = "red"
    bad = tmp_path / "extra.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 1 and "colour" in err
    del doc["colour"]
    doc["X"]["components"] = ["s0", "s1", "0"]
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 1 and "X" in err
    del doc["seed"]
    bad.write_text(json.dumps(doc))
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 1 and "seed" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent/instance.json")
    assert code == 1


def test_bad_flags(capsys):
    assert run(capsys, "analyze")[0] == 1
    assert run(capsys, "analyze", "skew-lines", "--field-override", "6")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1


def test_seed_precedence(capsys, monkeypatch):
    monkeypatch.setenv("JOINDEG_SEED", "77")
    _, doc, _ = run_json(capsys, "analyze", "skew-lines", "--no-oracle")
    assert doc["replay"]["seed"] == 77
    _, doc, _ = run_json(capsys, "analyze", "skew-lines", "--no-oracle", "--seed", "5")
    assert doc["replay"]["seed"] == 5
    monkeypatch.delenv("JOINDEG_SEED")
    _, doc, _ = run_json(capsys, "analyze", "skew-lines", "--no-oracle")
    assert doc["replay"]["seed"] == 1
    monkeypatch.setenv("JOINDEG_SEED", "abc")
    assert run(capsys, "analyze", "skew-lines")[0] == 1


@pytest.mark.parametrize("name", ["twisted-cubic-secant", "char2-conic"])
def test_replay_is_deterministic(capsys, name):
    _, first, _ = run_json(capsys, "analyze", name, "--seed", "11")
    _, second, _ = run_json(capsys, "analyze", name, "--seed", "11")
    a = json.dumps(scrub_timing(first), sort_keys=True)
    b = json.dumps(scrub_timing(second), sort_keys=True)
    assert a == b


def test_replay_from_embedded_instance(capsys, tmp_path):
    _, first, _ = run_json(capsys, "analyze", "disjoint-conics", "--seed", "3", "--trials", "2")
    path = tmp_path / "replay.json"
    doc = dict(first["instance"])
    doc["seed"], doc["trials"] = first["replay"]["seed"], first["replay"]["trials"]
    path.write_text(json.dumps(doc))
    _, second, _ = run_json(capsys, "analyze", str(path))
    assert scrub_timing(first)["sections"] == scrub_timing(second)["sections"]


def test_field_override(capsys):
    code, doc, _ = run_json(capsys, "analyze", "twisted-cubic-secant", "--field-override", "31", "--no-oracle")
    assert code == 0
    assert doc["instance"]["field"] == {"p": 31}
    assert doc["summary"]["deg_pi"] == 4


def test_oracle_twisted_cubic(capsys):
    code, doc, _ = run_json(capsys, "oracle", "twisted-cubic-secant", "--prime", "31")
    assert code == 0
    census = doc["oracle"]["census"]
    assert len(census) == 5 and all(c["P"] == 4 and c["b"] == 1 for c in census)


def test_oracle_char2_conic(capsys):
    code, doc, _ = run_json(capsys, "oracle", "char2-conic", "--prime", "2")
    assert code == 0
    o = doc["oracle"]
    assert o["dimension"]["dim"] == 2
    assert o["covered_points_base_field"] == o["ambient_points_base_field"] == 7


def test_oracle_not_prime(capsys):
    code, _, err = run(capsys, "oracle", "skew-lines", "--prime", "4")
    assert code == 1 and "not prime" in err


def test_oracle_budget_exceeded(capsys):
    code, _, err = run(capsys, "oracle", "skew-lines", "--prime", "31", "--budget", "10")
    assert code == 2 and "EnumerationBudgetExceeded" in err


def test_oracle_wrong_prime_for_char_p(capsys):
    code, _, err = run(capsys, "oracle", "char2-conic", "--prime", "3")
    assert code == 2 and "FieldMismatch" in err


@pytest.mark.parametrize("name", ["skew-lines", "twisted-cubic-secant", "disjoint-conics", "line-conic-p4"])
def test_crosscheck_agrees(capsys, name):
    code, doc, _ = run_json(capsys, "crosscheck", name, "--prime", "31")
    assert code == 0
    assert set(doc["verdicts"].values()) == {"AGREE"}
    assert "failing" not in doc


def test_crosscheck_defective_agrees(capsys):
    code, doc, _ = run_json(capsys, "crosscheck", "char2-conic")
    assert code == 0
    assert doc["verdicts"] == {"defective": "AGREE"}


def test_crosscheck_small_field_census_is_a_section_error(capsys):
    code, _, err = run(capsys, "crosscheck", "char2-two-conics")
    assert code == 2 and "PreconditionError" in err


def test_crosscheck_census_error_exit_2(capsys, monkeypatch):
    def boom(*a, **k):
        raise NonIntegralRatio("S/m_X = 3/2 is not an integer")

    monkeypatch.setattr(cli, "fiber_census", boom)
    code, _, err = run(capsys, "crosscheck", "skew-lines", "--trials", "1")
    assert code == 2 and "NonIntegralRatio" in err


def test_crosscheck_disagreement_exit_3(capsys, monkeypatch):
    real = cli.fiber_census

    def skewed(*a, **k):
        c = real(*a, **k)
        return replace(c, P=c.P + 1)

    monkeypatch.setattr(cli, "fiber_census", skewed)
    code, doc, _ = run_json(capsys, "crosscheck", "skew-lines", "--prime", "31")
    assert code == 3
    assert doc["verdicts"]["P"] == "DISAGREE"
    assert doc["failing"]["quantity"] == "P" and doc["failing"]["prime"] == 31


def test_analyze_section_error_exit_2(capsys, monkeypatch):
    def boom(*a, **k):
        raise NonIntegralRatio("forced")

    monkeypatch.setattr(analysis, "degree_ej", boom)
    code, doc, _ = run_json(capsys, "analyze", "skew-lines", "--no-oracle")
    assert code == 2
    assert doc["sections"]["degree"]["status"] == "error"
    assert doc["sections"]["census"]["status"] == "ok"


@pytest.mark.skipif(shutil.which("joindeg") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["joindeg", "list"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "skew-lines" in proc.stdout


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "joindeg.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "joindeg" in proc.stdout
