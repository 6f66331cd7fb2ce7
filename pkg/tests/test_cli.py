"""Batch front end: reports, exit codes, golden files."""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from descentlab import cli
from descentlab.complexes import (ChainMap, betti_numbers, chain_map_to_json,
                                  complex_to_json, single)
from descentlab.linalg import SparseMatrix
from descentlab.presheaf import presheaf_from_json, verify_descent
from descentlab.scalars import QQ

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(autouse=True)
def stable_threads(monkeypatch):
    monkeypatch.delenv("DESCENTLAB_THREADS", raising=False)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# exit codes on the bundled fixtures


def test_descent_bundled_triangle_passes(capsys):
    code, out, _ = run_cli(capsys, "descent")
    assert code == 0
    report = json.loads(out)
    assert report["ok"] and report["seed"] == 0
    check = report["checks"][0]
    assert check["id"] == "descent-quasi-iso"
    assert check["cech_betti"] == {"0": 1, "1": 1}


def test_descent_disjoint_fixture_fails(tmp_path, capsys):
    path = tmp_path / "disjoint.json"
    assert cli.main(["emit-fixture", "disjoint", "--out", str(path)]) == 0
    capsys.readouterr()
    code, out, _ = run_cli(capsys, "descent", "--input", str(path))
    assert code == 1
    check = json.loads(out)["checks"][0]
    assert not check["ok"] and check["witness_degree"] == 0


def test_malformed_json_is_an_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("this is not json {")
    code, _, err = run_cli(capsys, "homology", "--input", str(bad))
    assert code == 2 and "malformed JSON" in err


def test_missing_input_file_is_an_input_error(capsys):
    code, _, err = run_cli(capsys, "cech", "--input", "/nonexistent.json")
    assert code == 2 and "cannot read" in err


def test_unknown_fixture_is_an_input_error(capsys):
    code, _, err = run_cli(capsys, "emit-fixture", "nope")
    assert code == 2 and "nope" in err


def test_small_weight_cutoff_is_an_option_error(capsys):
    code, _, err = run_cli(capsys, "tw", "--weight-cutoff", "1")
    assert code == 2 and "cutoff" in err


# ---------------------------------------------------------------------------
# fixture emission


def test_emitted_triangle_is_directly_consumable(tmp_path, capsys):
    path = tmp_path / "tri.json"
    assert cli.main(["emit-fixture", "triangle-boundary",
                     "--out", str(path)]) == 0
    capsys.readouterr()
    F = presheaf_from_json(json.loads(path.read_text()))
    assert verify_descent(F).ok
    code, _, _ = run_cli(capsys, "compare", "--input", str(path))
    assert code == 0


def test_emitted_p1_presheaf_validates(tmp_path, capsys):
    path = tmp_path / "p1.json"
    assert cli.main(["emit-fixture", "p1-polyvector", "--out", str(path)]) == 0
    capsys.readouterr()
    code, _, _ = run_cli(capsys, "validate", "--input", str(path))
    assert code == 0


def test_seeded_emission_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["emit-fixture", "random", "--seed", "5",
                     "--out", str(a)]) == 0
    assert cli.main(["emit-fixture", "random", "--seed", "5",
                     "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    assert cli.main(["emit-fixture", "random", "--seed", "6",
                     "--out", str(c)]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_validate_reports_broken_restriction(tmp_path, capsys):
    path = tmp_path / "tri.json"
    assert cli.main(["emit-fixture", "triangle-boundary",
                     "--out", str(path)]) == 0
    capsys.readouterr()
    data = json.loads(path.read_text())
    for arrow in sorted(data["restrictions"]):
        mats = data["restrictions"][arrow]["mats"]
        for deg in sorted(mats):
            if mats[deg]:
                mats[deg][0][2] = "1/3"
                broken = tmp_path / "broken.json"
                broken.write_text(json.dumps(data))
                code, out, _ = run_cli(capsys, "validate",
                                       "--input", str(broken))
                assert code == 1
                report = json.loads(out)
                fails = [c for c in report["checks"] if not c["ok"]]
                assert fails and "witness" in fails[0]
                return
    raise AssertionError("no nonzero restriction entry found to corrupt")


# ---------------------------------------------------------------------------
# report determinism and golden files


def test_reports_are_byte_identical_across_runs(capsys):
    _, out1, _ = run_cli(capsys, "descent")
    _, out2, _ = run_cli(capsys, "descent")
    assert out1 == out2
    _, txt1, _ = run_cli(capsys, "descent", "--format", "text")
    _, txt2, _ = run_cli(capsys, "descent", "--format", "text")
    assert txt1 == txt2


@pytest.mark.parametrize("golden,argv", [
    ("descent_triangle.json", ("descent",)),
    ("descent_triangle.txt", ("descent", "--format", "text")),
    ("telescope_novikov.json", ("telescope",)),
    ("incl_excl_triangle.txt", ("incl-excl", "--format", "text")),
])
def test_golden_reports(capsys, golden, argv):
    code, out, _ = run_cli(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


# ---------------------------------------------------------------------------
# options plumbing


def test_degree_window_filters_table(capsys):
    code, out, _ = run_cli(capsys, "homology", "--degree-window", "0:0")
    assert code == 0
    assert json.loads(out)["checks"][0]["betti"] == {"0": 1}


def test_bad_degree_window_is_rejected(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["homology", "--degree-window", "zero"])
    assert err.value.code == 2


def test_threads_env_is_recorded(monkeypatch, capsys):
    monkeypatch.setenv("DESCENTLAB_THREADS", "3")
    code, out, _ = run_cli(capsys, "descent")
    assert code == 0 and json.loads(out)["threads"] == 3
    monkeypatch.setenv("DESCENTLAB_THREADS", "zebra")
    code, _, err = run_cli(capsys, "descent")
    assert code == 2 and "DESCENTLAB_THREADS" in err


def test_novikov_telescope_options(capsys):
    code, out, _ = run_cli(capsys, "telescope", "--novikov-den", "2",
                           "--novikov-e", "3/2", "--weight-cutoff", "5")
    assert code == 0
    check = json.loads(out)["checks"][0]
    assert check["torsion_u_orders"]["0"] == [3]
    assert check["induced_rank"] == 0
    code, _, err = run_cli(capsys, "telescope", "--weight-cutoff", "2")
    assert code == 2 and "truncation order" in err


# ---------------------------------------------------------------------------
# remaining subcommands end to end


def test_q_telescope_input(tmp_path, capsys):
    terms = [single(QQ, 0, 1) for _ in range(3)]
    maps = [ChainMap(terms[i], terms[i + 1], {0: SparseMatrix.identity(1)})
            for i in range(2)]
    blob = {"terms": [complex_to_json(c) for c in terms],
            "maps": [chain_map_to_json(m) for m in maps]}
    path = tmp_path / "tel.json"
    path.write_text(json.dumps(blob))
    code, out, _ = run_cli(capsys, "telescope", "--input", str(path))
    assert code == 0
    check = json.loads(out)["checks"][0]
    assert check["telescope_betti"] == check["last_term_betti"] == {"0": 1}


def test_covers_check_reports_violations(tmp_path, capsys):
    job = {
        "pairs": 1,
        "sequences": [["q1 - 1", "q1 - 1"]],
        "sets": ["q1"],
        "grid": [["-1", "1", "1"], ["-1", "1", "1"]],
    }
    path = tmp_path / "covers.json"
    path.write_text(json.dumps(job))
    code, out, _ = run_cli(capsys, "covers-check", "--input", str(path))
    assert code == 1
    check = json.loads(out)["checks"][0]
    bullets = {v["bullet"] for v in check["violations"]}
    assert "strictly-increasing" in bullets


def test_covers_check_bundled_job_passes(capsys):
    code, out, _ = run_cli(capsys, "covers-check")
    assert code == 0
    report = json.loads(out)
    assert [c["id"] for c in report["checks"]] == \
        ["weak-cover-bullets", "stage-monotonicity"]


def test_p1_demo(capsys):
    code, out, _ = run_cli(capsys, "p1-demo", "--laurent-cutoff", "5")
    assert code == 0
    ids = [c["id"] for c in json.loads(out)["checks"]]
    assert ids == ["p1-cech-betti", "p1-slice-oracle", "p1-chart-discrepancy"]


def test_module_entrypoint_subprocess():
    env = dict(os.environ)
    env.pop("DESCENTLAB_THREADS", None)
    proc = subprocess.run(
        [sys.executable, "-m", "descentlab.cli", "validate"],
        capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"]
