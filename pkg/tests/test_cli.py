import json
import subprocess
import sys

import numpy as np
import pytest

from saftlab import cli, signals


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(argv, capsys):
    code, out, err = run(argv, capsys)
    return code, json.loads(out), err


@pytest.fixture
def gauss_csv(tmp_path, capsys):
    path = tmp_path / "g.csv"
    assert run(["gen", "gaussian(1,1)", "--tgrid", "-8:8:2048", "--out", path], capsys)[0] == 0
    return path


def test_gen_gaussian_peak(tmp_path, capsys):
    code, rep, _ = run_json(["gen", "gaussian(1,1)", "--tgrid", "-8:8:2048", "--out", tmp_path / "g.csv"], capsys)
    assert code == 0
    assert rep["t_peak"] == pytest.approx(-0.5, abs=rep["dt"])
    sig = signals.read_signal(tmp_path / "g.csv")
    assert sig.n == 2048 and sig.t0 == -8


def test_gen_impulse(tmp_path, capsys):
    assert run(["gen", "impulse", "--out", tmp_path / "i.csv"], capsys)[0] == 0
    s = signals.read_signal(tmp_path / "i.csv")
    nz = np.flatnonzero(s.samples)
    assert nz.size == 1 and s.samples[nz[0]] == pytest.approx(1 / s.dt)


def test_gen_noise_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        assert run(["gen", "noise(42)", "--out", tmp_path / f"{name}.csv"], capsys)[0] == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    run(["gen", "noise", "--seed", 42, "--out", tmp_path / "c.csv"], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "c.csv").read_bytes()


def test_gen_unknown_kind_is_usage_error(tmp_path, capsys):
    code, _, err = run(["gen", "sawtooth", "--out", tmp_path / "x.csv"], capsys)
    assert code == 2 and "sawtooth" in err


def test_saft_report(gauss_csv, tmp_path, capsys):
    code, rep, _ = run_json(["saft", "--preset", "fourier", "--in", gauss_csv, "--out", tmp_path / "F.csv"], capsys)
    assert code == 0
    assert rep["parseval_residual"] <= 1e-6
    assert rep["grid"]["n"] == 2048


def test_saft_matrix_json_accepted(gauss_csv, capsys):
    m = '{"A":2,"B":1,"C":1,"D":1,"p":1,"q":1}'
    code, rep, _ = run_json(["saft", "--matrix", m, "--in", gauss_csv], capsys)
    assert code == 0 and rep["matrix"]["A"] == 2


def test_saft_matrix_file_and_tuple(gauss_csv, tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text('{"A":2,"B":1,"C":1,"D":1,"p":1,"q":1}')
    assert run(["saft", "--matrix", path, "--in", gauss_csv], capsys)[0] == 0
    assert run(["saft", "--matrix", "(2,1,1,1:1,1)", "--in", gauss_csv], capsys)[0] == 0


def test_missing_field_exit_2(gauss_csv, capsys):
    code, _, err = run(["saft", "--matrix", '{"A":2,"C":1,"D":1,"p":1,"q":1}', "--in", gauss_csv], capsys)
    assert code == 2 and "B" in err


def test_not_unimodular_exit_1(gauss_csv, capsys):
    code, _, err = run(["saft", "--matrix", "(1,1,1,1:0,0)", "--in", gauss_csv], capsys)
    assert code == 1 and "AD - BC" in err


def test_preset_and_matrix_conflict(gauss_csv, capsys):
    assert run(["saft", "--preset", "fourier", "--matrix", "(0,1,-1,0)", "--in", gauss_csv], capsys)[0] == 2


def test_missing_file_exit_2(tmp_path, capsys):
    assert run(["saft", "--in", tmp_path / "nope.csv"], capsys)[0] == 2


def test_malformed_file_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,re,im\n0,1,0\n1,x,0\n")
    code, _, err = run(["saft", "--in", bad], capsys)
    assert code == 2 and "line 3" in err


def test_isaft_roundtrip(gauss_csv, tmp_path, capsys):
    run(["saft", "--preset", "fractional(pi/4)", "--in", gauss_csv, "--out", tmp_path / "F.csv"], capsys)
    code, _, _ = run(["isaft", "--preset", "fractional(pi/4)", "--in", tmp_path / "F.csv",
                      "--t0", -8, "--out", tmp_path / "back.csv"], capsys)
    assert code == 0
    a, b = signals.read_signal(gauss_csv), signals.read_signal(tmp_path / "back.csv")
    assert np.linalg.norm(a.samples - b.samples) / np.linalg.norm(a.samples) < 1e-10


def test_cwt_closed_form_table(gauss_csv, tmp_path, capsys):
    code, rep, _ = run_json(["cwt", "--matrix", "(2,1,1,1:1,1)", "--in", gauss_csv,
                             "--grid", "-2:2:5,log(0.5):log(2):5", "--closed-form", "1,1",
                             "--out", tmp_path / "sc.csv"], capsys)
    assert code == 0
    table = rep["closed_form"]
    assert len(table["rows"]) == 25 and table["max_rel_err"] <= 1e-4
    assert (tmp_path / "sc.csv").read_text().startswith("b,a,re,im,abs")
    env = json.loads((tmp_path / "sc.json").read_text())
    assert len(env["b_grid"]) == 5 and env["data_ref"] == "sc.csv"


@pytest.mark.parametrize("grid", ["-2:2", "a:b:c,log(1):log(2):3", "-2:2:5,log(-1):log(2):4", "-2:2:5,log(1):log(2):0", "-2:2:0,log(1):log(2):3"])
def test_cwt_bad_grid_usage_error(gauss_csv, tmp_path, capsys, grid):
    code, _, _ = run(["cwt", "--in", gauss_csv, "--grid", grid, "--out", tmp_path / "s.csv"], capsys)
    assert code == 2


def test_cwt_paths_agree(gauss_csv, tmp_path, capsys):
    outs = {}
    for method in ("direct", "spectral"):
        run(["cwt", "--in", gauss_csv, "--grid", "-2:2:5,log(0.5):log(2):4", "--method", method,
             "--out", tmp_path / f"{method}.csv"], capsys)
        outs[method] = np.loadtxt(tmp_path / f"{method}.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(outs["spectral"], outs["direct"], atol=1e-9)


def test_icwt_roundtrip_default_grid(tmp_path, capsys):
    run(["gen", "morlet(4)", "--tgrid", "-32:32:4096", "--out", tmp_path / "m.csv"], capsys)
    assert run(["cwt", "--in", tmp_path / "m.csv", "--out", tmp_path / "sc.csv"], capsys)[0] == 0
    code, rep, _ = run_json(["icwt", "--in", tmp_path / "sc.json", "--reference", tmp_path / "m.csv",
                             "--out", tmp_path / "rec.csv"], capsys)
    assert code == 0 and rep["relative_rms"] <= 5e-2


def test_admissibility_command(capsys):
    code, rep, _ = run_json(["admissibility", "--matrix", "(2,1,1,1:1,1)"], capsys)
    assert code == 0 and len(rep["per_probe"]) == 8 and not rep["divergent"]
    code, rep, err = run_json(["admissibility", "--wavelet", "gaussian"], capsys)
    assert code == 1 and rep["divergent"] and "small scales" in err


@pytest.mark.parametrize("spec", ["fourier", "fractional(pi/4)"])
def test_mra_haar_curves(tmp_path, capsys, spec):
    out = tmp_path / "h.csv"
    code, rep, _ = run_json(["mra", "haar", "--preset", spec, "--out", out], capsys)
    assert code == 0 and rep["abs_piecewise_constant_dev"] < 1e-10
    assert out.read_text().startswith("t,re,im,abs")
    if spec == "fourier":
        assert rep["classical_max_dev"] < 1e-10


def test_mra_haar_reference_comparison(tmp_path, capsys):
    code, rep, _ = run_json(["mra", "haar", "--matrix", "(2,1,1,1:1,1)", "--out", tmp_path / "h.csv"], capsys)
    assert code == 0
    rows = rep["reference_comparison"]
    assert [r["k"] for r in rows] == [0, 1]
    for r in rows:
        assert r["computed_abs"] == pytest.approx(2**-0.5, abs=1e-12)


def test_mra_riesz(capsys):
    code, rep, _ = run_json(["mra", "riesz", "--phi", "haar", "--preset", "fourier"], capsys)
    assert code == 0 and rep["riesz"]
    code, rep, err = run_json(["mra", "riesz", "--phi", "step(1,-1)"], capsys)
    assert code == 1 and not rep["riesz"]


def test_mra_orthonormalize(capsys):
    code, rep, _ = run_json(["mra", "orthonormalize", "--phi", "bspline(2)", "--matrix", "(2,1,1,1:1,1)"], capsys)
    assert code == 0 and rep["max_dev"] < 1e-6


def test_mra_dwt_idwt(tmp_path, capsys):
    run(["gen", "noise(7)", "--tgrid", "-8:8:1024", "--out", tmp_path / "x.csv"], capsys)
    code, rep, _ = run_json(["mra", "dwt", "--matrix", "(2,1,1,1:1,1)", "--levels", 3, "--in", tmp_path / "x.csv",
                             "--out", tmp_path / "pyr.json"], capsys)
    assert code == 0 and rep["pr_residual"] <= 1e-10 and rep["levels"] == 3
    run(["mra", "idwt", "--in", tmp_path / "pyr.json", "--out", tmp_path / "back.csv"], capsys)
    a, b = signals.read_signal(tmp_path / "x.csv"), signals.read_signal(tmp_path / "back.csv")
    assert np.max(np.abs(a.samples - b.samples)) < 1e-10
    assert b.t0 == pytest.approx(a.t0) and b.dt == pytest.approx(a.dt)


def test_mra_dwt_refuses_bad_filters(tmp_path, capsys):
    bad = {"matrix": {"A": 0, "B": 1, "C": -1, "D": 0, "p": 0, "q": 0},
           "c": [{"k": 0, "re": 1, "im": 0}, {"k": 1, "re": 1, "im": 0}],
           "d": [{"k": 0, "re": -1, "im": 0}, {"k": 1, "re": 1, "im": 0}]}
    (tmp_path / "f.json").write_text(json.dumps(bad))
    run(["gen", "noise(7)", "--tgrid", "-8:8:64", "--out", tmp_path / "x.csv"], capsys)
    code, _, err = run(["mra", "dwt", "--filters", tmp_path / "f.json", "--in", tmp_path / "x.csv"], capsys)
    assert code == 1 and "QMF" in err


def test_mra_filters_report(tmp_path, capsys):
    code, rep, _ = run_json(["mra", "filters", "--matrix", "(2,1,1,1:1,1)", "--out", tmp_path / "f.json"], capsys)
    assert code == 0 and rep["qmf"]["alternation"] < 1e-10
    assert json.loads((tmp_path / "f.json").read_text())["c"][0]["k"] == 0


def test_mra_density(tmp_path, capsys):
    run(["gen", "gaussian(0,1)", "--tgrid", "-8:8:65536", "--out", tmp_path / "g.csv"], capsys)
    code, rep, _ = run_json(["mra", "density", "--matrix", "(2,1,1,1:1,1)", "--in", tmp_path / "g.csv"], capsys)
    assert code == 0 and rep["nondecreasing"] and rep["final"] >= 0.999
    # the default 2048-sample grid is too coarse for level 8
    run(["gen", "gaussian(0,1)", "--out", tmp_path / "c.csv"], capsys)
    assert run(["mra", "density", "--in", tmp_path / "c.csv"], capsys)[0] == 1


def test_report_file(gauss_csv, tmp_path, capsys):
    code, out, _ = run(["saft", "--in", gauss_csv, "--report", tmp_path / "r.json"], capsys)
    assert code == 0 and "parseval" in out.lower()
    assert "parseval_residual" in json.loads((tmp_path / "r.json").read_text())


def test_negative_values_are_joined():
    assert cli.join_negative_values(["--tgrid", "-8:8:10", "-h"]) == ["--tgrid=-8:8:10", "-h"]
    assert cli.join_negative_values(["--tgrid=-1:1:4"]) == ["--tgrid=-1:1:4"]


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "saftlab.cli", "gen", "impulse", "--out", str(tmp_path / "i.csv")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    res = subprocess.run([sys.executable, "-m", "saftlab.cli", "bogus"], capture_output=True, text=True)
    assert res.returncode == 2
