from __future__ import annotations

import json
import subprocess
import sys

import pytest

from curvelattice.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, run
from curvelattice.config import parse_configuration

from conftest import CONFIG_DIR


def _run(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_decompose_text(capsys):
    code, out, _ = _run(capsys, "decompose", CONFIG_DIR / "nine-curve.json")
    assert code == EXIT_OK
    assert "P^2 = 1/70" in out
    assert "P = 1 D0 + 4/5 D1 + 3/5 D2 + 2/5 D3 + 1/5 D4 + 5/7 D5 + 3/7 D6 + 1/7 D7 + 1/2 D8" in out


def test_decompose_json_round_trips(capsys):
    code, out, _ = _run(capsys, "decompose", CONFIG_DIR / "nine-curve.json", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["P_squared"] == "1/70"
    assert report["P"]["D7"] == "1/7"
    cfg, d = parse_configuration(json.dumps(report["input"]))
    original = parse_configuration((CONFIG_DIR / "nine-curve.json").read_text())
    assert (cfg, d) == original
    assert len(report["negative_support"]) == 8


def test_output_is_byte_identical(capsys):
    args = ("decompose", CONFIG_DIR / "b1.json", "--format", "json")
    first = _run(capsys, *args)[1]
    second = _run(capsys, *args)[1]
    assert first == second


def test_missing_file(capsys):
    code, out, err = _run(capsys, "decompose", "missing.json")
    assert code == EXIT_INPUT
    assert "missing.json" in err and out == ""


def test_bad_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"curves": [{"id": "A", "self": -2, "genus": 0}], "edges": [["A", "B"]]}')
    code, _, err = _run(capsys, "classify", bad)
    assert code == EXIT_INPUT and "B" in err
    assert _run(capsys, "nonsense")[0] == EXIT_INPUT
    assert _run(capsys, "census", "--min-weight", "0")[0] == EXIT_INPUT


def test_classify(capsys):
    code, out, _ = _run(capsys, "classify", CONFIG_DIR / "ii-star.json", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["star_fiber"]["type"] == "II*"
    assert list(report["star_fiber"]["multiplicities"].values()) == ["1", "2", "3", "4", "5", "6", "4", "2", "3"]
    assert report["elliptic_subfiber"]["type"] == "II_star"
    assert report["determinant"] == "0"


def test_check_suites(capsys):
    code, out, _ = _run(capsys, "check", CONFIG_DIR / "b1.json", "--suite", "trichotomy", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["kind"] == "case_B1"
    code, out, _ = _run(capsys, "check", CONFIG_DIR / "nine-curve.json", "--suite", "det-sign")
    assert code == EXIT_OK and "status: ok" in out
    code, out, _ = _run(
        capsys, "check", CONFIG_DIR / "nine-curve.json", "--suite", "chain-forcing", "--format", "json"
    )
    report = json.loads(out)
    assert code == EXIT_OK and not report["violation"]
    assert any(c["verdict"] == "forced_into_N" for c in report["chains"])
    code, _, _ = _run(capsys, "check", CONFIG_DIR / "k3-roundup.json", "--suite", "trichotomy")
    assert code == EXIT_INPUT


def test_check_reports_violation(capsys, tmp_path, monkeypatch):
    from curvelattice import cli

    monkeypatch.setitem(cli._SUITES, "det-sign", lambda cfg, d: (True, {"status": "failed"}))
    code, _, _ = _run(capsys, "check", CONFIG_DIR / "b1.json", "--suite", "det-sign")
    assert code == EXIT_VIOLATION


def test_census_small(capsys):
    code, out, _ = _run(capsys, "census", "--max-components", "6", "--weights", "-2", "-3", "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["violations"] == [] and report["total"] == 2 + 3 + 6 + 18 + 54 + 189
    code2, out2, _ = _run(
        capsys, "census", "--max-components", "6", "--weights=-2,-3", "--format", "json", "--jobs", "2"
    )
    assert out2 == out and code2 == EXIT_OK


def test_census_lemmas(capsys):
    code, out, _ = _run(capsys, "census", "--lemma", "subgraph", "--max-components", "6", "--weights", "-2", "-3")
    assert code == EXIT_OK and "failures: 0" in out
    code, out, _ = _run(capsys, "census", "--lemma", "det-sign", "--max-components", "6", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["failures"] == []


@pytest.mark.parametrize(
    "argv,key,value",
    [
        (["rr", "--m-sq", "-4", "--m-dot-k", "0", "--chi", "2"], "chi", "0"),
        (["noether", "--chi", "1", "--q", "0", "--k-sq", "0"], "b2", 10),
        (["multiplicity"], "canonical_fiber_coefficient", "1/6"),
        (["h0", "--kd-dot-d", "-2", "--chi", "1"], "value", "0"),
        (["restriction", "--c-dot-m", "1", "--c-dot-kc", "0"], "chi", "1"),
        (["hirzebruch", "--d", "2", "--horizontal", "1,1,-2", "--horizontal", "1,1,1"], "feasible", False),
    ],
)
def test_arith(capsys, argv, key, value):
    code, out, _ = _run(capsys, "arith", *argv, "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)[key] == value


def test_arith_missing_context(capsys):
    code, _, err = _run(capsys, "arith", "rr", "--m-sq", "1", "--m-dot-k", "0")
    assert code == EXIT_INPUT and "chi" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "curvelattice", "decompose", str(CONFIG_DIR / "a2-chain.json")],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert "P = 0" in proc.stdout
