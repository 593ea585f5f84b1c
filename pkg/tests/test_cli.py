import csv
import json
import math

import numpy as np
import pytest

from nasm import cli
from nasm.kam import load_circle
from nasm.maps import RotatingMapParams, nasm_trajectory
from nasm.transport import BoundaryCurve


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def manifest(path):
    with open(f"{path}.manifest.json") as fh:
        return json.load(fh)


def test_config_defaults_and_override():
    cfg = cli.load_config(text="")
    assert cfg.scan.M == 1000 and cfg.scan.N == 100_000 and cfg.solver.mode_cap == 2**13
    cfg = cli.load_config(text="[scan]\nM = 50\nbox = 0, 1, 0, 0.2\n[kam]\npad = yes\n")
    assert cfg.scan.M == 50 and cfg.scan.box == (0.0, 1.0, 0.0, 0.2) and cfg.solver.pad is True
    assert cfg.scan.N == 100_000


def test_config_errors_name_the_key(tmp_path):
    with pytest.raises(cli.ConfigError, match=r"'N'.*line 3"):
        cli.load_config(text="[scan]\nM = 5\nN = lots\n")
    with pytest.raises(cli.ConfigError, match="threshold"):
        cli.load_config(text="[scan]\nthreshold = 1\n")
    with pytest.warns(UserWarning, match="unknown key 'colour'"):
        cli.load_config(text="[scan]\ncolour = red\n")
    with pytest.warns(UserWarning, match="section"):
        cli.load_config(text="[plot]\nx = 1\n")
    bad = tmp_path / "bad.ini"
    bad.write_text("[scan]\nM = 1.5\n")
    assert cli.run_command(["--config", str(bad), "stability", "--res", "4", "--out", str(tmp_path / "s.csv")]) == 2


def test_stability_command(tmp_path, capsys):
    out = tmp_path / "stab.csv"
    assert cli.run_command(["stability", "--point", "II", "--res", "20", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 400 and set(rows[0]) == {"kappa1", "kappa2", "class", "stable"}
    assert json.loads(capsys.readouterr().out)["agreement"]["II"] == 1.0
    m = manifest(out)
    assert m["subcommand"] == "stability" and m["config"]["res"] == 20 and "wall_time" in m


def test_curve_roundtrip(tmp_path):
    c = BoundaryCurve("kam", omega=0.6180339887498949, tol=1e-3, resolution=8192)
    c.add(0.1, 0.45, 1e-3)
    c.add(0.0, 0.48, 2e-3)
    cli.export_curve(c, tmp_path / "c.json", "json")
    back = cli.load_curve(tmp_path / "c.json")
    assert back.kappa1 == c.kappa1 and back.omega == c.omega and back.widths == c.widths
    cli.export_curve(c, tmp_path / "c.csv")
    rows = read_csv(tmp_path / "c.csv")
    assert [float(r["angle"]) for r in rows] == [0.0, 0.1]
    assert rows[0]["omega"] == "0.6180339887498949" and rows[0]["N_or_modes"] == "8192"
    assert float(rows[1]["kappa1"]) == c.kappa1[0]  # exact round-trip
    cli.export_curve(BoundaryCurve("direct"), tmp_path / "e.csv")
    assert (tmp_path / "e.csv").read_text().strip() == ",".join(cli.CURVE_COLUMNS)
    with pytest.raises(ValueError):
        cli.export_curve(c, tmp_path / "c.x", "xml")
    (tmp_path / "bad.json").write_text("{}")
    with pytest.raises(ValueError):
        cli.load_curve(tmp_path / "bad.json")


def test_trace_cb_direct(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "1")
    out = tmp_path / "cb.csv"
    argv = ["trace-cb", "--angles", "0.5,1.0", "--M", "30", "--N", "2000", "--tol", "0.02", "--out", str(out)]
    assert cli.run_command(argv) == 0
    rows = read_csv(out)
    assert len(rows) == 2 and rows[0]["method"] == "direct" and rows[0]["M"] == "30"
    assert manifest(out)["config"]["scan"]["N"] == 2000


def test_trace_cb_kam_json(tmp_path):
    out = tmp_path / "cb.json"
    argv = ["trace-cb", "--method", "kam", "--angles", "0", "--mode-cap", "1024", "--format", "json", "--out", str(out)]
    assert cli.run_command(argv) == 0
    c = cli.load_curve(out)
    assert c.omega == 0.6180339887498949 and 0.4 < c.radii[0] < 0.486


def test_kam_solve(tmp_path, capsys):
    out = tmp_path / "k.npz"
    argv = ["kam-solve", "--kappa1", "0.3", "--n", "128", "--out", str(out), "--csv", str(tmp_path / "k.csv")]
    assert cli.run_command(argv) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["residual"] < 1e-11
    K, header = load_circle(out)
    assert header["omega_name"] == "golden" and K.n == rec["n"]
    assert manifest(out)["outputs"] == [str(out), str(tmp_path / "k.csv")]


def test_kam_solve_failure(tmp_path, capsys):
    argv = ["kam-solve", "--kappa1", "0.3", "--omega", "0.5", "--out", str(tmp_path / "k.npz")]
    assert cli.run_command(argv) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "RuntimeError" and "SmallDivisor" in err["message"]


def test_orbit_and_rotmap(tmp_path):
    a, b = tmp_path / "o.csv", tmp_path / "r.csv"
    assert cli.run_command(["orbit", "--kappa1", "0.5", "--kappa2", "0.7", "--x0", "0.1", "--y0", "0.2",
                            "--n", "100", "--nasm", "--out", str(a)]) == 0
    rp = RotatingMapParams(0.6, 0.1, 0.5, 0.5)
    assert cli.run_command(["rotmap", "--kbar", "0.6", "--dkappa", "0.1", "--phi0", "0.5", "--x0", "0.1",
                            "--y0", "0.2", "--n", "100", "--out", str(b)]) == 0
    orb = np.loadtxt(a, delimiter=",", skiprows=1)
    rot = np.loadtxt(b, delimiter=",", skiprows=1)
    assert rp.nasm_params() == pytest.approx((0.5, 0.7))
    assert np.max(np.abs(orb[:, 1:3] - rot[:, 1:3])) < 1e-12
    assert np.allclose(orb[:, 1:3], nasm_trajectory((0.5, 0.7), (0.1, 0.2), 100))


def test_rotation_command(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert cli.run_command(["rotation", "--kappa1", "0", "--y0", "0.3", "--n", "1000", "--cf-depth", "2",
                            "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["omega"] == pytest.approx(0.6) and rec["cf"][:2] == [0, 1]


def test_scan_transport(tmp_path):
    out = tmp_path / "t.csv"
    assert cli.run_command(["scan-transport", "--box", "0,2,0,2", "--res", "2", "--M", "20", "--N", "2000",
                            "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [r["transport"] for r in rows] == ["0", "1", "1", "1"]


@pytest.mark.parametrize("argv", [[], ["orbit", "--n", "x"], ["frobnicate"], ["stability", "--box", "1,2"],
                                  ["trace-cb", "--method", "guess"]])
def test_bad_flags(argv):
    assert cli.run_command(argv) != 0


def test_unwritable_output(tmp_path):
    assert cli.run_command(["stability", "--res", "2", "--out", str(tmp_path / "no" / "x.csv")]) == 2


def test_fmt():
    assert cli.fmt(None) == "" and cli.fmt(3) == "3" and cli.fmt(True) == "1"
    assert float(cli.fmt(math.pi)) == math.pi
