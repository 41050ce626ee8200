import csv
import io
import json
import math
import os
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from eelwrist.cli import eval_number, main

DEFAULT = str(resources.files("eelwrist").joinpath("data/default.json"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


@pytest.mark.parametrize("text, value", [("1.5", 1.5), ("pi", math.pi), ("-pi/2", -math.pi / 2),
                                         ("2*pi/3", 2 * math.pi / 3), ("π/4", math.pi / 4)])
def test_eval_number(text, value):
    assert eval_number(text) == pytest.approx(value)


def test_fk_all_four_branches(capsys):
    doc = run_json(capsys, "fk", "--config", DEFAULT, "--q", "0.1,0.2,pi/4", "--all", "--radians")
    assert doc["count"] == 4
    assert sum(abs(s["pitch"] - math.pi / 2) < 1e-7 for s in doc["solutions"]) == 2
    for s in doc["solutions"]:
        assert max(abs(r) for r in s["residuals"]) <= 1e-9


def test_fk_single_degrees(capsys):
    doc = run_json(capsys, "fk", "--config", DEFAULT, "--q", "0,0,45")
    assert doc["solution"]["rpy"] == [45.0, 0.0, 0.0]


def test_pi_means_radians_in_degree_mode(capsys):
    a = run(capsys, "fk", "--q", "0,0,pi/4")[1]
    b = run(capsys, "fk", "--q", "0,0,45")[1]
    assert a == b


def test_fk_numeric_for_other_variants(capsys):
    doc = run_json(capsys, "fk", "--variant", "parallel_axes", "--q", "5,5,0")
    assert doc["solution"]["method"] == "numeric"


def test_ik_all_four(capsys):
    doc = run_json(capsys, "ik", "--config", DEFAULT, "--rpy", "45,15,15", "--all")
    assert doc["count"] == 4
    assert sorted(s["mode"] for s in doc["solutions"]) == ["++", "+-", "-+", "--"]


def test_ik_then_fk_round_trip(capsys):
    q = run_json(capsys, "ik", "--rpy", "50,10,-5")["q"]
    doc = run_json(capsys, "fk", "--q=" + ",".join(repr(v) for v in q))
    assert doc["solution"]["rpy"] == pytest.approx([50, 10, -5], abs=1e-6)


def test_ik_relative_and_mode(capsys):
    rel = run_json(capsys, "ik", "--rpy", "5,0,0", "--relative")["q"]
    ab = run_json(capsys, "ik", "--rpy", "50,0,0")["q"]
    assert rel == pytest.approx(ab, abs=1e-6)
    other = run_json(capsys, "ik", "--rpy", "50,0,0", "--mode", "mm")["q"]
    assert other[:2] != pytest.approx(ab[:2])
    assert run_json(capsys, "ik", "--rpy", "50,0,0", "--mode=-+")["q"][1] == pytest.approx(ab[1])
    assert run(capsys, "ik", "--rpy", "50,0,0", "--mode=--")[0] == 1
    assert run(capsys, "ik", "--rpy", "50,0,0", "--mode", "px")[0] == 1


def test_ik_unreachable_exit_2(capsys):
    code, out, err = run(capsys, "ik", "--rpy", "0,170,0")
    assert code == 2 and "Unreachable" in err and out == ""


def test_jac_home_and_states(capsys):
    doc = run_json(capsys, "jac", "--config", DEFAULT)
    assert doc["singularity"] == "regular"
    assert doc["B"][0][0] == pytest.approx(math.sqrt(2) / 2, abs=1e-8)
    assert doc["J_inv"] is not None
    doc = run_json(capsys, "jac", "--variant", "parallel_axes")
    assert doc["kappa_A"] == pytest.approx(1.0)
    doc = run_json(capsys, "jac", "--rpy", "10,5,-3", "--relative")
    assert doc["singularity"] == "regular"


def test_check_feasible_and_not(capsys):
    doc = run_json(capsys, "check", "--config", DEFAULT, "--rpy", "0,0,0", "--relative")
    assert doc["feasible"] is True and doc["failed"] == []
    doc = run_json(capsys, "check", "--rpy", "0,40,0", "--relative")
    assert doc["feasible"] is False and doc["failed"]


def test_singular_scan_csv(capsys, tmp_path):
    out = tmp_path / "scan.csv"
    code, stdout, _ = run(capsys, "singular-scan", "--config", DEFAULT, "--n-az", "8",
                          "--n-tilt", "4", "--out", str(out))
    assert code == 0 and stdout == ""
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["torsion", "azimuth", "tilt", "detA", "detB"]
    assert len(rows) == 1 + 8 * 5


def test_workspace_to_directory(capsys, tmp_path):
    code, out, _ = run(capsys, "workspace", "--config", DEFAULT, "--out", str(tmp_path),
                       "--format", "json", "--jointspace")
    assert code == 0
    assert "torsion extent: [-18, 18]" in out
    doc = json.loads((tmp_path / "workspace.json").read_text())
    assert doc["torsion_extent"] == [-18.0, 18.0]
    assert (tmp_path / "jointspace.csv").read_text().startswith("t1_deg,t2_deg,t3_deg\n")


def test_workspace_stdout_formats(capsys):
    code, out, err = run(capsys, "workspace", "--n-phi", "12")
    assert code == 0 and out.startswith("torsion_deg,") and "torsion extent" in err
    code, out, _ = run(capsys, "workspace", "--n-phi", "12", "--format", "obj", "--threads", "3")
    assert code == 0 and out.startswith("# workspace side surface")


def test_jointspace(capsys):
    code, out, _ = run(capsys, "jointspace", "--config", DEFAULT, "--n-phi", "12", "--offset", "0.01")
    rows = np.loadtxt(io.StringIO(out), delimiter=",", skiprows=1)
    assert code == 0 and rows.shape[1] == 3 and len(rows) % 12 == 0


def test_targets_reports_failures_by_name(capsys):
    doc = run_json(capsys, "targets", "--config", DEFAULT, "--grid", "5")
    assert doc["samples"] == 125
    assert 0 < doc["percent"] <= 100
    if doc["percent"] < 100:
        assert doc["failure_counts"] and doc["worst"]["failed"]
    doc = run_json(capsys, "targets", "--yaw", "0", "--pitch", "0", "--roll", "0")
    assert doc["percent"] == 100 and doc["samples"] == 1


@pytest.mark.slow
def test_calibrate(capsys):
    doc = run_json(capsys, "calibrate", "--config", DEFAULT, "--top", "3")
    assert len(doc["ranking"]) == 3
    best = doc["best"]
    assert best["lima"] == pytest.approx(30.0) and best["lima_c"] == pytest.approx(50.0)


@pytest.mark.parametrize("argv", [[], ["nope"], ["fk"], ["fk", "--q", "1,2"], ["ik", "--rpy", "a,b,c"],
                                  ["workspace", "--threads", "0"], ["workspace", "--format", "stl"]])
def test_usage_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and "error" in err and out == ""


def test_config_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format": 2}))
    code, _, err = run(capsys, "fk", "--config", str(bad), "--q", "0,0,0")
    assert code == 1 and "config" in err
    code, _, err = run(capsys, "fk", "--config", str(tmp_path / "none.json"), "--q", "0,0,0")
    assert code == 1


def test_help_exit_0(capsys):
    assert main(["--help"]) == 0
    assert "fk" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["fk", "--q", "0.1,0.2,pi/4", "--all", "--radians"],
    ["ik", "--rpy", "45,15,15", "--all"],
    ["jac", "--rpy", "40,3,2"],
    ["check", "--rpy", "10,5,2", "--relative"],
    ["singular-scan", "--n-az", "6", "--n-tilt", "3"],
    ["workspace", "--n-phi", "24", "--format", "json"],
    ["targets", "--grid", "3"],
])
def test_byte_identical_outputs(capsys, argv):
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b and a[0] == 0


def test_console_script_entry_point(tmp_path):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "eelwrist.cli", "ik", "--rpy", "45,15,15", "--all"],
                          capture_output=True, text=True, env=env, cwd=tmp_path)
    assert proc.returncode == 0 and json.loads(proc.stdout)["count"] == 4
    proc = subprocess.run([sys.executable, "-m", "eelwrist.cli", "ik", "--rpy", "0,170,0"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 2
