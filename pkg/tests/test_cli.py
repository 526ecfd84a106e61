import json

import numpy as np
import pytest
from click.testing import CliRunner

from birkhoff_lab.cli import main
from birkhoff_lab.core import CirculantVector, circulant_to_matrix, cyclic_permutation, flat_matrix, identity
from birkhoff_lab.explorer.fixtures import Q_MATRIX
from birkhoff_lab.explorer.raster import read_ppm
from birkhoff_lab.matrix_io import read_complex_matrix, write_matrix


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, m in {
        "q": Q_MATRIX,
        "w3": flat_matrix(3),
        "i3": identity(3),
        "pi3": cyclic_permutation(3, 1),
        "c4": circulant_to_matrix(CirculantVector([0.1, 0.2, 0.3, 0.4])),
    }.items():
        path = tmp_path / f"{name}.txt"
        write_matrix(path, m)
        out[name] = str(path)
    return out


def test_check_not_unistochastic(runner, files):
    res = runner.invoke(main, ["check", files["q"]])
    assert res.exit_code == 1
    payload = json.loads(res.output)
    assert payload["bracelet"]["holds"] is False
    assert payload["certificate"]["verdict"] == "not_unistochastic"


def test_check_unistochastic(runner, files):
    res = runner.invoke(main, ["check", files["c4"], "--no-heuristic"])
    assert res.exit_code == 0
    assert json.loads(res.output)["certificate"]["method"] == "d4-circulant"


def test_check_unknown_without_heuristic(runner, tmp_path):
    path = tmp_path / "b5.txt"
    write_matrix(path, flat_matrix(5))
    res = runner.invoke(main, ["check", str(path), "--no-heuristic"])
    assert res.exit_code == 2
    assert json.loads(res.output)["certificate"]["verdict"] == "unknown"


def test_check_bad_input(runner, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n0.5 0.6\n0.5 0.4\n")
    res = runner.invoke(main, ["check", str(path)])
    assert res.exit_code == 3
    assert "sums to" in res.output


def test_witness(runner, files, tmp_path):
    out = tmp_path / "u.txt"
    res = runner.invoke(main, ["witness", files["w3"], "-o", str(out)])
    assert res.exit_code == 0
    u = read_complex_matrix(out)
    np.testing.assert_allclose(np.abs(u) ** 2, 1 / 3, atol=1e-12)
    assert runner.invoke(main, ["witness", files["q"], "-o", str(tmp_path / "x.txt")]).exit_code == 1
    assert not (tmp_path / "x.txt").exists()


def test_spectra(runner, tmp_path):
    prefix = tmp_path / "d3"
    res = runner.invoke(main, ["spectra", "-d", "3", "--step", "0.1", "-o", str(prefix)])
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["failures"] == 0
    assert (tmp_path / "d3_points.csv").exists() and (tmp_path / "d3_boundary.csv").exists()


def test_spectra_bad_step(runner, tmp_path):
    res = runner.invoke(main, ["spectra", "-d", "3", "--step", "0.3", "-o", str(tmp_path / "x")])
    assert res.exit_code == 2


def test_cross_section(runner, files, tmp_path):
    prefix = tmp_path / "xs"
    args = ["cross-section", "--anchors", files["w3"], files["i3"], files["pi3"], "--res", "24", "--extent", "1.5"]
    res = runner.invoke(main, args + ["-o", str(prefix)])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert payload["counts"]["BRACELET"] == 0
    assert payload["star_shape"]["failures"] == 0
    assert read_ppm(tmp_path / "xs.ppm").shape == (24, 24, 3)


def test_cross_section_collinear(runner, files, tmp_path):
    args = ["cross-section", "--anchors", files["w3"], files["i3"], files["q"], "--res", "4", "-o", str(tmp_path / "c")]
    assert runner.invoke(main, args).exit_code == 2


def test_tetra(runner, tmp_path):
    args = ["tetra", "--plane", "1,0,0,0", "0,0,1,0", "0,0.5,0,0.5", "--res", "16", "-o", str(tmp_path / "t")]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["edge_pixels"] > 0


def test_tetra_invalid(runner, tmp_path):
    args = ["tetra", "--plane", "1,0,0,0", "1,0,0,0", "0,1,0,0", "-o", str(tmp_path / "t")]
    assert runner.invoke(main, args).exit_code == 2


def test_fuzz(runner, tmp_path):
    res = runner.invoke(main, ["fuzz", "--d", "3", "--trials", "50", "-o", str(tmp_path / "f")])
    assert res.exit_code == 0, res.output
    report = json.loads((tmp_path / "f" / "report.json").read_text())
    assert report["seed"] == 7 and report["trials"] == 50 and report["violations"] == []


def test_fixtures(runner):
    res = runner.invoke(main, ["fixtures", "--restarts", "3"])
    lines = res.output.splitlines()
    assert [line.split()[1].rstrip(":") for line in lines] == ["Q", "B", "B^2"]
    assert all(line.startswith("PASS") for line in lines)
    assert res.exit_code == 0
