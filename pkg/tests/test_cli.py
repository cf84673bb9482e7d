import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from fanstate import cli, report
from fanstate.phasespace import QGrid, peak_find


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def grid_from_csv(text, bounds, res):
    header, data = read_csv(text)
    assert header == ["x", "y", "Q"]
    return QGrid(*bounds, data[:, 2].reshape(res))


class TestGenerate:
    def test_fidelity_report(self, capsys):
        code, out, _ = run(["generate", "--alpha", "1", "--atoms", "2"], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["target"]["fidelity"] == pytest.approx(1, abs=1e-12)
        assert rep["target"]["fan_k"] == 1
        assert rep["paper_probability"] == pytest.approx(0.21753982021724108, abs=1e-12)
        assert rep["record_probability"] == pytest.approx(0.38321687598235964, abs=1e-12)
        assert list(rep)[:4] == ["alpha", "steps", "per_step_norm_sq", "conditional_probs"]

    def test_vacuum(self, capsys):
        code, out, _ = run(["generate", "--alpha", "0", "--atoms", "3"], capsys)
        rep = json.loads(out)
        assert code == 0
        assert len(rep["final_state"]) == 1
        assert rep["final_state"][0]["amp"] == {"re": 0, "im": 0}
        assert rep["paper_probability"] == pytest.approx(1, abs=1e-12)
        assert rep["record_probability"] == pytest.approx(1, abs=1e-12)

    def test_verify(self, capsys):
        code, out, _ = run(["generate", "--alpha", "2", "--atoms", "4", "--verify"], capsys)
        assert code == 0
        assert json.loads(out)["oracle_max_deviation"] < 1e-8

    def test_complex_alpha_plus_basis_csv(self, capsys):
        code, out, _ = run(["generate", "--alpha", "1,0.3", "--atoms", "3", "--basis", "plus", "--format", "csv"], capsys)
        header, data = read_csv(out)
        assert code == 0
        assert header == ["coeff_re", "coeff_im", "amp_re", "amp_im"]
        assert data.shape == (8, 4)
        np.testing.assert_allclose(np.hypot(data[:, 2], data[:, 3]), abs(1 + 0.3j), atol=1e-12)

    def test_deviation_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(report, "oracle_deviation", lambda run, D: 1e-3)
        code, _, err = run(["generate", "--alpha", "1", "--atoms", "2", "--verify"], capsys)
        assert code == 3
        assert "deviation" in err

    @pytest.mark.parametrize("argv", [["generate", "--alpha", "1", "--atoms", "1"], ["generate", "--alpha", "x"]])
    def test_usage_errors(self, argv, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2


class TestProbSweep:
    def test_fig4_vacuum(self, capsys):
        code, out, _ = run(["prob-sweep", "fig4", "--r-min", "0", "--r-max", "3", "--r-steps", "13"], capsys)
        header, data = read_csv(out)
        assert code == 0
        assert header == ["r", "P1_pi_first", "P1_half_pi_first"]
        assert data[0, 1:] == pytest.approx([1, 1], abs=1e-15)

    def test_fig4_single_order(self, capsys):
        _, out, _ = run(["prob-sweep", "fig4", "--tau-order", "half-pi-first", "--r-steps", "5"], capsys)
        assert read_csv(out)[0] == ["r", "P1_half_pi_first"]

    def test_fig3_start(self, capsys):
        _, out, _ = run(["prob-sweep", "fig3", "--tau-steps", "50"], capsys)
        header, data = read_csv(out)
        assert header == ["tau", "P_same_r0.5", "P_flip_r0.5", "P_same_r1", "P_flip_r1", "P_same_r5", "P_flip_r5"]
        assert data[0, 0] == 0
        np.testing.assert_allclose(data[0, 1::2], 1, atol=1e-15)
        np.testing.assert_allclose(data[0, 2::2], 0, atol=1e-15)
        np.testing.assert_allclose(data[:, 1::2] + data[:, 2::2], 1, atol=1e-14)

    def test_fig5_decreasing(self, capsys):
        _, out, _ = run(["prob-sweep", "fig5", "--r-min", "0.5", "--r-max", "0.5", "--r-steps", "1"], capsys)
        header, data = read_csv(out)
        assert header == ["r", "P_k1", "P_k2", "P_k4", "P_k8"]
        vals = data[0, 1:]
        assert np.all(np.diff(vals) < 0)

    def test_json(self, capsys):
        _, out, _ = run(["prob-sweep", "fig5", "--r-steps", "3", "--format", "json"], capsys)
        obj = json.loads(out)
        assert obj["columns"][0] == "r" and len(obj["rows"]) == 3

    @pytest.mark.parametrize(
        "argv",
        [
            ["prob-sweep", "fig4", "--r-min", "2", "--r-max", "1"],
            ["prob-sweep", "fig4", "--r-min", "-1"],
            ["prob-sweep", "fig5", "--r-steps", "0"],
            ["prob-sweep", "fig6"],
        ],
    )
    def test_bad_ranges(self, argv, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2


class TestQfunc:
    def test_fig1(self, capsys):
        code, out, err = run(["qfunc", "--alpha", "2", "--k", "1", "--bounds", "-5,5,-5,5", "--res", "101,101"], capsys)
        assert code == 0
        assert "pi*Q" in err
        assert out.startswith("x,y,Q\n")
        assert len(peak_find(grid_from_csv(out, (-5, 5, -5, 5), (101, 101)), 0.5)) == 4

    def test_fig2(self, capsys):
        _, out, _ = run(["qfunc", "--alpha", "3.5", "--k", "2", "--bounds", "-5,5,-5,5"], capsys)
        assert len(peak_find(grid_from_csv(out, (-5, 5, -5, 5), (201, 201)), 0.5)) == 8

    def test_vacuum(self, capsys):
        _, out, _ = run(["qfunc", "--alpha", "0", "--k", "1", "--res", "41"], capsys)
        peaks = peak_find(grid_from_csv(out, (-3, 3, -3, 3), (41, 41)), 0.5)
        assert len(peaks) == 1
        assert peaks[0][:2] == pytest.approx((0, 0), abs=1e-12)

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["qfunc", "--alpha", "1", "--k", "0"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit):
            cli.main(["qfunc", "--alpha", "1", "--bounds", "1,1,0,1"])


class TestVerify:
    def test_default_passes(self, capsys):
        code, out, _ = run(["verify", "--cases", "5"], capsys)
        assert code == 0 and out.startswith("ok")

    def test_injected_fault(self, capsys):
        code, out, _ = run(["verify", "--tol-scale", "0"], capsys)
        assert code == 1
        assert out.startswith("FAIL") and "case 0" in out

    def test_zero_cases(self, capsys):
        code, _, err = run(["verify", "--cases", "0"], capsys)
        assert code == 0 and "warning" in err


def test_out_file(tmp_path, capsys):
    target = tmp_path / "p1.csv"
    assert cli.main(["prob-sweep", "fig4", "--r-steps", "4", "--out", str(target)]) == 0
    data = target.read_bytes()
    assert data.startswith(b"r,P1_pi_first,P1_half_pi_first\n")
    assert b"\r" not in data


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "fanstate", "prob-sweep", "fig5", "--r-steps", "3"], capture_output=True, check=True
    )
    assert res.stdout.splitlines()[0] == b"r,P_k1,P_k2,P_k4,P_k8"
