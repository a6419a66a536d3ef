import json
import shutil
import subprocess
import sys

import pytest

from qecforge.cli import main, parse_device
from qecforge.sim import read_table


def _run(*argv):
    assert main([str(a) for a in argv]) == 0


def test_full_pipeline(tmp_path):
    f = {k: tmp_path / k for k in ("c.stim", "r.stim", "n.stim", "m.dem", "d.b8", "o.b8", "t.json", "x.json")}
    _run("generate", "--family", "repetition", "--distance", 3, "--rounds", 2, "-o", f["c.stim"])
    _run("transpile", f["c.stim"], "--device", "line:5", "--gateset", "heron", "-o", f["r.stim"],
         "--tracker", f["t.json"], "--metrics", f["x.json"])
    assert json.loads(f["x.json"].read_text())["swaps_inserted"] >= 0
    _run("noise", f["r.stim"], "--model", "si1000", "--p", 0.005, "--device", "line:5", "--tracker", f["t.json"],
         "-o", f["n.stim"])
    _run("dem", f["n.stim"], "-o", f["m.dem"])
    _run("sample", f["n.stim"], "--shots", 500, "--seed", 1, "-o", f["d.b8"], "--obs-out", f["o.b8"])
    num_det = sum(1 for line in f["m.dem"].read_text().splitlines() if line.startswith("detector"))
    assert read_table(f["d.b8"], max(num_det, 1)).shape[0] == 500
    _run("decode", "--dem", f["m.dem"], "--dets", f["d.b8"], "--obs", f["o.b8"])


def test_decode_reports_rate(tmp_path, capsys):
    circ = tmp_path / "c.stim"
    _run("generate", "--family", "repetition", "--distance", 3, "--rounds", 1, "-o", circ)
    _run("noise", circ, "--model", "uniform", "--p", 0.01, "-o", tmp_path / "n.stim")
    _run("dem", tmp_path / "n.stim", "-o", tmp_path / "m.dem")
    _run("sample", tmp_path / "n.stim", "--shots", 200, "--format", "csv", "-o", tmp_path / "d.csv",
         "--obs-out", tmp_path / "o.csv")
    capsys.readouterr()
    _run("decode", "--dem", tmp_path / "m.dem", "--dets", tmp_path / "d.csv", "--obs", tmp_path / "o.csv",
         "--format", "csv", "--decoder", "bposd", "--variant", "parity-check")
    out = json.loads(capsys.readouterr().out)
    assert out["shots"] == 200 and 0 <= out["logical_error_rate"] <= 1


def test_run_writes_reports(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"configs": [{"name": "a", "code": {"family": "repetition", "distance": 3},
                                            "noise": {"kind": "uniform", "p": 0.01}, "shots": 300}]}))
    _run("run", "--config", cfg, "--out", tmp_path / "out")
    assert (tmp_path / "out" / "results.csv").exists()
    assert "a: LER" in capsys.readouterr().out


def test_errors_return_nonzero(tmp_path, capsys):
    assert main(["generate", "--family", "surface", "--distance", "4"]) == 2
    assert "qecforge generate" in capsys.readouterr().err
    assert main(["dem", str(tmp_path / "missing.stim")]) == 2


def test_device_specs(tmp_path):
    assert parse_device("grid:3x4").num_qubits == 12
    dev = parse_device("preset:willow_x3")
    path = tmp_path / "d.json"
    path.write_text(dev.to_json())
    assert parse_device(str(path)).num_qubits == dev.num_qubits


@pytest.mark.skipif(shutil.which("qecforge") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["qecforge", "--version"], capture_output=True, text=True, check=True)
    assert out.stdout.startswith("qecforge ")
    out = subprocess.run([sys.executable, "-m", "qecforge.cli", "generate", "--family", "steane", "--level", "1"],
                         capture_output=True, text=True, check=True)
    assert "DETECTOR" in out.stdout
