import io
import json
import subprocess
import sys

import numpy as np
import pytest

from hbarcheck.cli import main
from hbarcheck.io import dump_covariance_spec, write_wavefunction_csv, write_wigner_csv
from hbarcheck.wignergrid import GridWavefunction, PositionGrid, hermite_wavefunction, wigner_transform

from conftest import SIGMA_X


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def files(tmp_path_factory, coherent_psi, hermite1_psi):
    d = tmp_path_factory.mktemp("cli")
    cov = d / "coherent.json"
    dump_covariance_spec(cov, np.diag([0.5, 0.5]))
    psi = d / "coherent_psi.csv"
    write_wavefunction_csv(psi, coherent_psi)
    h1 = d / "hermite1_w.csv"
    write_wigner_csv(h1, wigner_transform(hermite1_psi))
    wig = d / "coherent_w.csv"
    assert run("wigner", psi, "--out", wig)[0] == 0
    return {"dir": d, "cov": cov, "psi": psi, "wigner": wig, "hermite1": h1}


class TestClassify:
    @pytest.mark.parametrize("hp, label, code", [
        (1.0, "QuantumPure", 0),
        (0.5, "QuantumMixed", 0),
        (1.5, "ClassicalOnly", 2),
    ])
    def test_trichotomy(self, files, hp, label, code):
        c, out, err = run("classify", files["cov"], "--hbar", hp)
        report = json.loads(out)
        assert c == code
        assert report["exit_code"] == code
        assert report["result"]["label"] == label
        assert report["result"]["hbar_critical"] == pytest.approx(1.0)
        assert label in err

    def test_rescaled_reference(self, tmp_path):
        # same physical state with hbar_ref = 2: every scale doubles
        cov = tmp_path / "c.json"
        dump_covariance_spec(cov, np.diag([1.0, 1.0]), hbar_ref=2.0)
        c, out, _ = run("classify", cov, "--hbar", 2.0)
        assert c == 0
        result = json.loads(out)["result"]
        assert result["label"] == "QuantumPure"
        assert result["hbar_critical"] == pytest.approx(2.0)

    def test_grid_cross_check(self, files):
        c, out, _ = run("classify", files["cov"], "--hbar", 0.5, "--grid-n", 128)
        cross = json.loads(out)["result"]["grid_cross_check"]
        assert c == 0
        assert cross["label"] == "Mixed"
        assert cross["purity"] == pytest.approx(0.5, abs=1e-3)

    def test_malformed(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 1, "hbar_ref": 1, "sigma": [[1, 0], [0]]}')
        c, out, err = run("classify", bad, "--hbar", 1.0)
        assert c == 1
        assert out == ""
        assert "sigma" in err

    def test_not_positive_definite(self, tmp_path):
        cov = tmp_path / "neg.json"
        dump_covariance_spec(cov, np.diag([1.0, -1.0]))
        c, out, _ = run("classify", cov, "--hbar", 1.0)
        assert c == 3
        assert json.loads(out)["result"]["label"] == "Invalid"

    def test_missing_file(self, tmp_path):
        assert run("classify", tmp_path / "nope.json", "--hbar", 1.0)[0] == 1


class TestUsage:
    @pytest.mark.parametrize("argv", [
        [],
        ["bogus"],
        ["classify", "x.json"],
        ["classify", "x.json", "--hbar", "-1"],
        ["classify", "x.json", "--hbar", "abc"],
    ])
    def test_usage_errors(self, argv):
        assert run(*argv)[0] == 1


class TestWigner:
    def test_coherent_matches_analytic(self, files):
        from hbarcheck.io import read_wigner_csv
        w = read_wigner_csv(files["wigner"])
        x, p = np.meshgrid(w.xvalues, w.pvalues, indexing="ij")
        expected = np.exp(-(x**2 + p**2)) / np.pi
        assert np.abs(w.w - expected).max() <= 1e-8

    def test_hermite1_negative_at_origin(self, files, hermite1_psi):
        psi = files["dir"] / "h1_psi.csv"
        out = files["dir"] / "h1_out.csv"
        write_wavefunction_csv(psi, hermite1_psi)
        c, text, _ = run("wigner", psi, "--out", out)
        assert c == 0
        assert json.loads(text)["result"]["min_w"] < -0.3

    def test_small_grid(self, tmp_path):
        g = PositionGrid(6.0, 16)
        psi = tmp_path / "psi16.csv"
        write_wavefunction_csv(psi, hermite_wavefunction(0, 0.5, g))
        c, text, _ = run("wigner", psi, "--out", tmp_path / "w16.csv")
        assert c == 0
        assert json.loads(text)["result"]["mass"] == pytest.approx(1.0, abs=1e-6)
        # the momentum window is only +-2 sigma_p wide at N = 16; pointwise error is ~4e-2
        from hbarcheck.io import read_wigner_csv
        w = read_wigner_csv(tmp_path / "w16.csv")
        x, p = np.meshgrid(w.xvalues, w.pvalues, indexing="ij")
        assert np.abs(w.w - np.exp(-2 * x**2 - p**2 / 2) / np.pi).max() < 0.05

    def test_edge_leakage(self, tmp_path):
        g = PositionGrid(2.0, 64)
        psi = GridWavefunction.from_samples(g, np.exp(-g.points**2 / 4))
        path = tmp_path / "wide.csv"
        write_wavefunction_csv(path, psi)
        c, text, err = run("wigner", path, "--out", tmp_path / "w.csv")
        assert c == 3
        result = json.loads(text)["result"]
        assert result["edge_magnitude"] == pytest.approx(psi.edge_magnitude)
        assert f"{psi.edge_magnitude:.3e}" in err

    def test_not_normalized(self, tmp_path, grid):
        psi = GridWavefunction(grid, 2 * hermite_wavefunction(0, SIGMA_X, grid).values)
        path = tmp_path / "unnorm.csv"
        write_wavefunction_csv(path, psi)
        assert run("wigner", path, "--out", tmp_path / "w.csv")[0] == 3

    def test_out_required(self, files):
        assert run("wigner", files["psi"])[0] == 1


class TestVerify:
    @pytest.mark.parametrize("hp, label, code", [(1.0, "Pure", 0), (0.5, "Mixed", 0), (1.5, "NotAState", 2)])
    def test_coherent(self, files, hp, label, code):
        c, out, _ = run("verify", files["wigner"], "--hbar", hp)
        assert c == code
        assert json.loads(out)["result"]["label"] == label

    def test_klm_points(self, files):
        c, out, _ = run("verify", files["wigner"], "--hbar", 1.0, "--klm-points", 12, "--seed", 4)
        sample = json.loads(out)["result"]["klm_finite_sample"]
        assert c == 0
        assert sample["passed"] is True
        assert len(sample["points"]) == 12

    def test_corrupted(self, files, tmp_path):
        lines = files["wigner"].read_text().splitlines()
        lines[100] = "1,2"
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        assert run("verify", bad, "--hbar", 1.0)[0] == 1

    def test_tol_flag_echoed(self, files):
        out = json.loads(run("verify", files["wigner"], "--hbar", 1.0, "--tol", 1e-6)[1])
        assert out["tolerances"]["psd"] == 1e-6


class TestScan:
    def test_coherent_cov(self, files):
        c, out, err = run("scan", files["cov"], "--hbar-min", 0.5, "--hbar-max", 1.5, "--steps", 11)
        result = json.loads(out)["result"]
        assert c == 0
        assert result["critical_hbar"] == pytest.approx(1.0)
        hits = [t for t in result["transitions"] if t["to"] == "ClassicalOnly"]
        assert len(hits) == 1
        assert hits[0]["hbar_before"] == pytest.approx(1.0, abs=0.1)
        assert "critical hbar = 1" in err

    def test_hermite1_grid(self, files):
        c, out, _ = run("scan", files["hermite1"], "--hbar-min", 0.8, "--hbar-max", 1.2, "--steps", 5)
        verdicts = json.loads(out)["result"]["verdicts"]
        assert c == 0
        assert [v["label"] == "Pure" for v in verdicts] == [False, False, True, False, False]

    def test_two_steps(self, files):
        c, out, _ = run("scan", files["cov"], "--hbar-min", 0.5, "--hbar-max", 1.5, "--steps", 2)
        assert c == 0
        assert [v["hbar_prime"] for v in json.loads(out)["result"]["verdicts"]] == [0.5, 1.5]

    @pytest.mark.parametrize("extra", [["--steps", "1"], ["--steps", "3", "--hbar-max", "0.1"]])
    def test_bad_range(self, files, extra):
        argv = ["scan", files["cov"], "--hbar-min", "0.5", "--hbar-max", "1.5", "--steps", "3"]
        argv += extra
        assert run(*argv)[0] == 1


class TestSpectrumAndPurity:
    def test_spectrum_cov(self, files):
        c, out, _ = run("spectrum", files["cov"])
        assert c == 0
        assert json.loads(out)["result"]["symplectic_eigenvalues"] == pytest.approx([0.5])

    def test_spectrum_grid(self, files):
        c, out, _ = run("spectrum", files["wigner"], "--hbar", 0.5)
        ev = json.loads(out)["result"]["eigenvalues"]
        assert c == 0
        assert ev[:2] == pytest.approx([2 / 3, 2 / 9], abs=1e-6)

    def test_spectrum_grid_not_state(self, files):
        assert run("spectrum", files["wigner"], "--hbar", 1.5)[0] == 2

    def test_spectrum_grid_needs_hbar(self, files):
        assert run("spectrum", files["wigner"])[0] == 1

    @pytest.mark.parametrize("hp, code", [(0.5, 0), (1.0, 0), (1.5, 2)])
    def test_purity_cov(self, files, hp, code):
        c, out, _ = run("purity", files["cov"], "--hbar", hp)
        purity = json.loads(out)["result"]["purity"]
        assert c == code
        assert purity == (pytest.approx(hp) if code == 0 else None)

    def test_purity_grid(self, files):
        c, out, _ = run("purity", files["wigner"], "--hbar", 0.5)
        assert c == 0
        assert json.loads(out)["result"]["purity"] == pytest.approx(0.5, abs=1e-3)


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["classify", "{cov}", "--hbar", "1.5"],
        ["verify", "{wigner}", "--hbar", "1.0", "--klm-points", "8", "--seed", "7"],
        ["scan", "{cov}", "--hbar-min", "0.5", "--hbar-max", "1.5", "--steps", "11"],
    ])
    def test_byte_identical(self, files, argv):
        argv = [a.format(cov=files["cov"], wigner=files["wigner"]) for a in argv]
        first, second = run(*argv), run(*argv)
        assert first == second

    def test_wigner_output_identical(self, files, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("wigner", files["psi"], "--out", a)
        run("wigner", files["psi"], "--out", b)
        assert a.read_bytes() == b.read_bytes() == files["wigner"].read_bytes()

    def test_out_file_matches_stdout(self, files, tmp_path):
        out = tmp_path / "report.json"
        _, text, _ = run("classify", files["cov"], "--hbar", 1.0, "--out", out)
        assert out.read_text() == text

    def test_entry_point(self, files):
        proc = subprocess.run(
            [sys.executable, "-m", "hbarcheck", "classify", str(files["cov"]), "--hbar", "1.5"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
        assert json.loads(proc.stdout)["result"]["label"] == "ClassicalOnly"
