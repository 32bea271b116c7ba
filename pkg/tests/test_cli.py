"""Command-line parsing, exit codes and subcommand outputs."""
import argparse
import json
import subprocess
import sys

import numpy as np
import pytest

from bryant.cli import (
    EXIT_ERROR, EXIT_FAILED, EXIT_OK, parse_bounds, parse_c_grid, parse_decimal, parse_mesh_grid, run,
)
from bryant.mesh import read_obj
from bryant.surface import REFERENCE_BOUNDS


def test_parse_decimal():
    assert parse_decimal("0.0495") == 0.0495
    assert parse_decimal(" 1.78 ") == 1.78
    for bad in ("nan", "inf", "1,5", "abc"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_decimal(bad)


def test_parse_c_grid():
    g = parse_c_grid("0.0495:0.0505:0.0001")
    assert len(g) == 11 and g[0] == 0.0495 and g[-1] == 0.0505
    assert g[3] == 0.0498
    assert parse_c_grid("0.05:0.05:0.001") == [0.05]
    for bad in ("0.05:0.04:0.001", "0:1:0.3", "0:1", "0:1:0"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_c_grid(bad)


def test_parse_mesh_grid_and_bounds():
    assert parse_mesh_grid("24x16") == (24, 16)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_mesh_grid("1x5")
    assert parse_bounds("reference") == REFERENCE_BOUNDS
    assert parse_bounds("1,2,3,4").as_tuple() == (1, 2, 3, 4)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_bounds("1,2,3")


@pytest.mark.parametrize("argv", [
    ["certify", "--c1", "0.0505", "--c2", "0.0495"],
    ["certify", "--a", "0.9"],
    ["certify", "--frobnicate"],
    ["sweep", "--grid", "0.05:0.04:0.01"],
    ["mesh", "--preset", "torus"],
    ["integrate", "--n", "4001"],
    [],
])
def test_usage_errors_exit_1(argv, capsys):
    assert run(argv) == EXIT_ERROR
    assert capsys.readouterr().err


def test_certify_failed_exit_2(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code = run(["certify", "--subintervals", "2", "--epsilon-scale", "1e6", "--out", str(out)])
    assert code == EXIT_FAILED
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "FAILED"
    assert "FAILED" in capsys.readouterr().err


def test_certify_override_must_dominate(capsys):
    assert run(["certify", "--override-bounds", "1,1,1,1"]) == EXIT_ERROR
    assert "PreconditionViolation" in capsys.readouterr().err


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert run(["sweep", "--grid", "0.0495:0.0505:0.0001", "--n", "1000", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "c,f1,f2,f1_width,f2_width,flag"
    assert len(lines) == 12
    assert all(l.endswith(",ok") for l in lines[1:])


def test_bounds_table(capsys):
    assert run(["bounds"]) == EXIT_OK
    text = capsys.readouterr().out
    for key in ("alpha1", "alpha2", "used", "epsilon", "epsilon_hat", "derivative bound"):
        assert key in text
    assert run(["bounds", "--override-bounds", "reference"]) == EXIT_OK
    assert "4.6" in capsys.readouterr().out


def test_integrate_json(capsys):
    assert run(["integrate", "--c", "0.05", "--n", "500", "--path", "alpha2"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["path"] == "alpha2" and len(doc["bounds"]) == 16
    assert doc["max_width"] < 1e-9


def test_mesh_obj(tmp_path):
    out = tmp_path / "m.obj"
    assert run(["mesh", "--preset", "catenoid_cousin", "--lambda", "0.2", "--grid", "6x5",
                "--out", str(out)]) == EXIT_OK
    v, f = read_obj(out)
    assert v.shape == (30, 3) and f.shape == (20, 4)
    assert np.all(np.linalg.norm(v, axis=1) < 1)


def test_help_shows_defaults():
    proc = subprocess.run([sys.executable, "-m", "bryant", "certify", "--help"],
                          capture_output=True, text=True, check=True)
    assert "default: 0.0495" in proc.stdout and "default: 4000" in proc.stdout
