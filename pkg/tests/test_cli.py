import csv
import json
import subprocess
import sys

import pytest

from nfdelta import builtin_fields, ideal_counts
from nfdelta.cli import EXIT_BOUND, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, main


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_delta_identity_passes(tmp_path):
    out = tmp_path / "d.csv"
    code = main(["delta-identity", "--field", "Qi", "--Q", "3,4", "--norms", "50", "--out", str(out)])
    assert code == EXIT_PASS
    rows = _rows(out)
    assert len(rows) == 2 * (1 + int(ideal_counts(builtin_fields()["Qi"], 50).sum()))
    assert all(float(r["error"]) <= 1e-8 and r["pass"] == "1" for r in rows)
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["passed"] and side["fields"][0]["disc"] == -4
    assert side["failed_rows"] == 0


def test_degenerate_Q_fails(tmp_path):
    out = tmp_path / "d.csv"
    code = main(["delta-identity", "--field", "Qi", "--Q", "2", "--norms", "5", "--out", str(out)])
    assert code == EXIT_FAIL
    assert {r["status"] for r in _rows(out)} == {"degenerate"}


def test_empty_grid_header_only(tmp_path):
    for suite, flag in (("deligne", "--p-grid"), ("pdecay", "--q-grid"), ("delta-identity", "--q-grid")):
        out = tmp_path / f"{suite}.csv"
        assert main([suite, flag, "", "--out", str(out)]) == EXIT_PASS
        lines = out.read_text().splitlines()
        assert len(lines) == 1 and lines[0].startswith(("p,", "field,"))


def test_config_errors(tmp_path):
    out = str(tmp_path / "x.csv")
    assert main(["no-such-suite", "--out", out]) == EXIT_CONFIG
    assert main(["delta-identity", "--field", "Q(zeta5)", "--out", out]) == EXIT_CONFIG
    assert main(["count-compare", "--field", "Qi", "--out", out]) == EXIT_CONFIG
    assert main(["deligne", "--p-grid", "7,x", "--out", out]) == EXIT_CONFIG
    assert main(["poisson", "--field", "Q,Qi", "--out", out]) == EXIT_CONFIG
    assert main(["delta-identity", "--config", str(tmp_path / "missing.json"), "--out", out]) == EXIT_CONFIG


def test_resource_bound_writes_partial(tmp_path):
    out = tmp_path / "c.csv"
    code = main(["count-compare", "--P", "6", "--max-points", "10", "--out", str(out)])
    assert code == EXIT_BOUND
    assert len(out.read_text().splitlines()) == 1
    side = json.loads(out.with_suffix(".json").read_text())
    assert not side["passed"] and "stopped" in side["summary"]


def test_config_file_field(tmp_path):
    cfg = {"name": "Q(sqrt(-2))", "min_poly": [1, 0, 2], "disc": -8, "class_number": 1,
           "class_reps": [[[1, 0]]], "fundamental_units": [], "roots_of_unity": 2, "regulator": 1.0}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "o.csv"
    code = main(["char-orthogonality", "--config", str(path), "--max-norm", "12", "--alpha-norm", "20",
                 "--out", str(out)])
    assert code == EXIT_PASS
    assert {r["field"] for r in _rows(out)} == {"Q(sqrt(-2))"}


def test_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["deligne", "--p-grid", "7,13", "--seed", "3"]
    assert main(args + ["--out", str(a)]) == main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_count_compare(tmp_path):
    out = tmp_path / "c.csv"
    code = main(["count-compare", "--field", "Q", "--form", "x3+y3-2z3", "--P", "6", "--out", str(out)])
    assert code == EXIT_PASS
    assert all(float(r["relative"]) <= 0.05 for r in _rows(out))


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.csv"
    res = subprocess.run([sys.executable, "-m", "nfdelta", "singular-series", "--max-norm", "8", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode in (EXIT_PASS, EXIT_FAIL)
    assert res.stdout.startswith(("[PASS]", "[FAIL]"))
    assert len(_rows(out)) == 8


@pytest.mark.parametrize("suite", ["h-decay", "poisson", "avg-I", "expsum-identities"])
def test_suites_write_artifacts(tmp_path, suite):
    out = tmp_path / f"{suite}.csv"
    extra = {"h-decay": ["--field", "Q"], "poisson": ["--r-grid", "0.02,0.01"],
             "avg-I": ["--field", "Q", "--x-grid", "0.4"], "expsum-identities": ["--field", "Q"]}[suite]
    code = main([suite, "--out", str(out)] + extra)
    assert code in (EXIT_PASS, EXIT_FAIL)
    rows = _rows(out)
    assert rows and "pass" in rows[0]
    assert json.loads(out.with_suffix(".json").read_text())["suite"] == suite
