import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from magline.cli import CSV_HEADER, main, parse_ic, UsageError

ANNULUS = "--ic=2,0,0,0,0,1"
SECH = f"--ic={2 * math.cos(math.pi / 6)!r},{2 * math.sin(math.pi / 6)!r},0,0,0,-1"
W2 = -2 / (1 + math.sqrt(5))
CASE_II = f"--ic=1,0,0,0,{-math.sqrt(-W2)!r},{W2!r}"
HELIX = ["--field", "trans-z", "--strength", "2", f"--ic=0,0,0,{math.sqrt(0.75)!r},0,0.5"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_annulus(capsys):
    code, out, _ = run(capsys, "classify", "--field", "rot-z", ANNULUS)
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {"config", "case", "invariants", "samples", "summary"}
    assert doc["case"]["kind"] == "planar-annulus"
    inv = doc["invariants"]
    assert inv["p0"] == 0 and inv["q0"] == 3
    assert inv["rho_interval"] == pytest.approx([2.0, 2 * math.sqrt(2)])
    assert inv["roots"] == pytest.approx([0, 4, 8], abs=1e-12)


def test_classify_csv(capsys):
    code, out, _ = run(capsys, "classify", ANNULUS, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and rows[0]["case"] == "planar-annulus"
    assert float(rows[0]["rho_max"]) == pytest.approx(2 * math.sqrt(2))


def test_classify_axis_degenerate(capsys):
    code, out, _ = run(capsys, "classify", "--ic=0,0,0,1,0,0")
    assert code == 0 and json.loads(out)["case"]["kind"] == "axis-degenerate"


def test_classify_non_existent_invariants(capsys):
    code, out, _ = run(capsys, "classify", "--invariants=1,-3")
    case = json.loads(out)["case"]
    assert code == 0
    assert case == {"kind": "non-existent", "q0": -3.0, "reason": "all-roots-negative"}


@pytest.mark.parametrize("args", [["--invariants=1,-3"], ["--invariants=1,0"],
                                  ["--ic=0,0,0,1,0,0"]])
def test_closed_form_impossible_exits_2(capsys, args):
    code, _, err = run(capsys, "closed-form", *args)
    assert code == 2 and "no trajectory" in err


@pytest.mark.parametrize("argv", [
    ["classify", "--ic=1,2,3"],
    ["classify", "--ic=a,b,c,d,e,f"],
    ["classify", "--ic=1,0,0,0.5,0,0"],
    ["classify"],
    ["classify", "--field", "rot-q", ANNULUS],
    ["classify", "--field", "rot-z", "--strength", "2", ANNULUS],
    ["trace", ANNULUS, "--dt", "-1"],
    ["classify", ANNULUS, "--invariants=0,1"],
    ["classify", "--field", "rot-x", "--invariants=0,1"],
    ["bogus"],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 1


def test_ic_normalisation():
    assert parse_ic("1,0,0,0,0,1.0000005").speed == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(UsageError):
        parse_ic("1,0,0,0,0,1.00001")


def test_trace_csv_schema(capsys, tmp_path):
    out = tmp_path / "run.csv"
    code, _, _ = run(capsys, "trace", ANNULUS, "--t-end", "1", "--format", "csv", "--out", str(out))
    lines = out.read_text().splitlines()
    assert code == 0
    assert lines[0] == "t,x,y,z,vx,vy,vz,speed_drift,p0_drift,q0_drift"
    assert tuple(lines[0].split(",")) == CSV_HEADER
    assert len(lines) == 102
    row = lines[50].split(",")
    # 17 significant digits: parsing and re-printing is lossless
    assert all(format(float(v), ".17g") == v for v in row)


def test_trace_json_schema(capsys):
    code, out, _ = run(capsys, "trace", ANNULUS, "--t-end", "0.5", "--dt", "0.1")
    doc = json.loads(out)
    assert code == 0
    assert set(doc["samples"][0]) == set(CSV_HEADER)
    assert len(doc["samples"]) == 6
    assert doc["config"]["t_end"] == 0.5
    assert doc["summary"]["max_speed_drift"] < 1e-9


def test_trace_helix_frenet_post_check(capsys):
    code, out, _ = run(capsys, "frenet", *HELIX, "--t-end", "2")
    s = json.loads(out)["summary"]
    assert code == 0
    assert s["kappa_min"] == pytest.approx(math.sqrt(3), abs=1e-8)
    assert s["kappa_max"] == pytest.approx(math.sqrt(3), abs=1e-8)
    assert s["tau_min"] == pytest.approx(1.0, abs=1e-8)
    assert s["tau_max"] == pytest.approx(1.0, abs=1e-8)


def test_trace_helix_samples(capsys):
    code, out, _ = run(capsys, "trace", *HELIX, "--t-end", "3")
    pos = np.array([[r["x"], r["y"], r["z"]] for r in json.loads(out)["samples"]])
    # radius |s|^-1 sqrt(1 - w0^2) about the centre (0, sqrt(0.75)/2)
    rad = np.hypot(pos[:, 0], pos[:, 1] - math.sqrt(0.75) / 2)
    assert code == 0 and np.abs(rad - math.sqrt(0.75) / 2).max() < 1e-8


def test_compare_sech_within_1e_6(capsys):
    code, out, err = run(capsys, "compare", SECH, "--t-end", "10", "--tol", "1e-6")
    doc = json.loads(out)
    assert code == 0
    assert doc["summary"]["max_deviation"] <= 1e-6
    assert "max_deviation" in err
    assert {"x_cf", "deviation"} <= set(doc["samples"][0])


def test_compare_fails_with_tiny_tolerance(capsys):
    code, _, _ = run(capsys, "compare", SECH, "--t-end", "10", "--tol", "1e-15")
    assert code == 3


def test_compare_impossible(capsys):
    code, _, _ = run(capsys, "compare", "--invariants=1,-3")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ["--field", "rot-x", "--ic=0.3,1.2,0,0.6,0,0.8"],
    [ANNULUS],
    [CASE_II],
    HELIX,
    ["--invariants=0.3,0.8,1.1"],
])
def test_round_trip_classify_then_compare(capsys, tmp_path, argv):
    path = tmp_path / "c.json"
    assert run(capsys, "classify", *argv, "--out", str(path))[0] == 0
    tag = json.loads(path.read_text())["case"]
    code, out, _ = run(capsys, "compare", "--from", str(path), "--t-end", "5")
    assert code == 0
    assert json.loads(out)["case"] == tag


def test_round_trip_detects_changed_tag(capsys, tmp_path):
    path = tmp_path / "c.json"
    run(capsys, "classify", ANNULUS, "--out", str(path))
    doc = json.loads(path.read_text())
    doc["case"] = {"kind": "planar-sech", "q0": 1.0}
    path.write_text(json.dumps(doc))
    assert run(capsys, "compare", "--from", str(path))[0] == 3


def test_closed_form_csv(capsys):
    code, out, _ = run(capsys, "closed-form", CASE_II, "--t-end", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 201
    assert max(float(r["speed_drift"]) for r in rows) < 1e-14


def _plot_data(script):
    lines = script.splitlines()
    start = lines.index("$traj << EOD") + 2
    stop = lines.index("EOD")
    return np.array([[float(v) for v in ln.split()] for ln in lines[start:stop]])


def test_export_plot_annulus(capsys, tmp_path):
    data = tmp_path / "a.json"
    run(capsys, "compare", ANNULUS, "--t-end", "10", "--out", str(data))
    code, out, _ = run(capsys, "export-plot", "--in", str(data))
    rho = _plot_data(out)[:, 4]
    assert code == 0 and "splot $traj" in out and "plot $traj using 1:5" in out
    assert rho.min() >= 2 - 1e-6 and rho.max() <= 2 * math.sqrt(2) + 1e-6
    assert rho.max() - rho.min() > 0.8


def test_export_plot_case_ii_from_csv(capsys, tmp_path):
    data = tmp_path / "h.csv"
    run(capsys, "closed-form", CASE_II, "--format", "csv", "--out", str(data))
    code, out, _ = run(capsys, "export-plot", "--in", str(data), "--out", str(tmp_path / "h.gp"))
    rho = _plot_data((tmp_path / "h.gp").read_text())[:, 4]
    assert code == 0 and np.abs(rho - 1).max() < 1e-12


def test_export_plot_planar_sech_strip(capsys, tmp_path):
    data = tmp_path / "s.json"
    run(capsys, "closed-form", SECH, "--t-end", "10", "--out", str(data))
    code, out, _ = run(capsys, "export-plot", "--in", str(data))
    d = _plot_data(out)
    # planar at phi0 = pi/6 and inside the strip rho <= 2
    assert code == 0
    assert np.abs(d[:, 2] - math.tan(math.pi / 6) * d[:, 1]).max() < 1e-12
    assert d[:, 4].max() <= 2 + 1e-12


def test_export_plot_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "export-plot", "--in", str(tmp_path / "nope.json"))
    assert code == 1 and "cannot read" in err


def test_module_entry_point_and_logging(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "magline", "classify", ANNULUS],
                          capture_output=True, text=True, env={"MAGLINE_LOG": "DEBUG",
                                                              "PATH": "/usr/bin:/bin"})
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["case"]["kind"] == "planar-annulus"
