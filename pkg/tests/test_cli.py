import json

import numpy as np
import pytest

from starcmdfa import build_covariance, canonicalize
from starcmdfa.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestClassify:
    def test_text_output(self, capsys):
        code, out, _ = run(capsys, "classify", "--alpha", "0.5,0.5,0.5")
        assert code == 0
        assert out.strip() == "non-dominant (margin=-0.577350)"

    def test_json_output(self, capsys):
        code, out, _ = run(capsys, "classify", "--alpha", "0.8,0.3,0.3",
                           "--format", "json")
        payload = json.loads(out)
        assert code == 0
        assert payload["regime"] == "dominant"
        assert payload["margin"] == pytest.approx(0.70436243, rel=1e-6)


class TestSolve:
    def test_dominant_n2(self, capsys):
        code, out, _ = run(capsys, "solve", "--alpha", "0.8,0.3")
        assert code == 0
        payload = json.loads(out)
        sol = payload["solution"]
        assert sol["regime"] == "dominant"
        np.testing.assert_allclose(sol["d"], [0.76, 0.76], atol=1e-9)
        assert sol["x1_star"] == pytest.approx(1.4, abs=1e-9)
        assert payload["certificate"]["passed"] is True
        assert payload["mi"]["i_cmdfa"] == pytest.approx(0.2447741, abs=1e-6)

    def test_text_format(self, capsys):
        code, out, _ = run(capsys, "solve", "--alpha", "0.5,0.5,0.5",
                           "--format", "text")
        assert code == 0
        assert "regime: non-dominant" in out
        assert "passed: True" in out


class TestVerify:
    def test_self_check_passes(self, capsys):
        code, out, _ = run(capsys, "verify", "--alpha", "0.8,0.3,0.3")
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_round_trip_with_solved_d(self, capsys):
        _, out, _ = run(capsys, "solve", "--alpha", "0.8,0.3,0.3")
        d = json.loads(out)["solution"]["d"]
        d_arg = ",".join(repr(v) for v in d)
        code, out2, _ = run(capsys, "verify", "--alpha", "0.8,0.3,0.3",
                            "--d", d_arg)
        assert code == 0
        assert json.loads(out2)["passed"] is True

    def test_perturbed_d_fails(self, capsys):
        code, out, _ = run(capsys, "verify", "--alpha", "0.8,0.3",
                           "--d", "0.761,0.76")
        assert code == 0
        assert json.loads(out)["passed"] is False


class TestMi:
    def test_nats_and_bits(self, capsys):
        _, out_nats, _ = run(capsys, "mi", "--alpha", "0.5,0.5,0.5")
        _, out_bits, _ = run(capsys, "mi", "--alpha", "0.5,0.5,0.5", "--bits")
        nats = json.loads(out_nats)
        bits = json.loads(out_bits)
        assert nats["units"] == "nats" and bits["units"] == "bits"
        assert nats["i_star"] == pytest.approx(0.5 * np.log(2.0), rel=1e-9)
        assert bits["i_star"] == pytest.approx(0.5, rel=1e-9)


class TestSweep:
    def test_csv_output(self, capsys):
        code, out, _ = run(capsys, "sweep", "--theta-rest", "0.314485,0.314485",
                           "--theta1", "0.8:2.0:13")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "theta1,margin,i_star,i_cmdfa,i_up,i_low"
        assert len(lines) == 14
        theta1 = [float(line.split(",")[0]) for line in lines[1:]]
        assert theta1 == sorted(theta1)
        assert all(a < b for a, b in zip(theta1, theta1[1:]))


class TestSample:
    def test_deterministic_via_env(self, capsys, monkeypatch):
        monkeypatch.setenv("CMDFA_SEED", "99")
        code, out1, _ = run(capsys, "sample", "--alpha", "0.5,0.5", "-m", "4")
        _, out2, _ = run(capsys, "sample", "--alpha", "0.5,0.5", "-m", "4")
        assert code == 0
        assert out1 == out2
        assert len(out1.strip().splitlines()) == 4

    def test_seed_flag_overrides(self, capsys, monkeypatch):
        monkeypatch.setenv("CMDFA_SEED", "99")
        _, out_env, _ = run(capsys, "sample", "--alpha", "0.5,0.5", "-m", "4")
        _, out_flag, _ = run(capsys, "sample", "--alpha", "0.5,0.5", "-m", "4",
                             "--seed", "99")
        assert out_env == out_flag

    def test_write_to_file(self, capsys, tmp_path):
        out_file = tmp_path / "batch.csv"
        code, _, _ = run(capsys, "sample", "--alpha", "0.6,0.4,0.2",
                         "-m", "7", "--seed", "1", "--out", str(out_file))
        assert code == 0
        data = np.loadtxt(out_file, delimiter=",")
        assert data.shape == (7, 3)


class TestEstimate:
    def test_from_matrix_file(self, capsys, tmp_path):
        C = build_covariance(canonicalize([0.8, 0.3, 0.3])).matrix
        path = tmp_path / "cov.csv"
        np.savetxt(path, C, delimiter=",")
        code, out, _ = run(capsys, "estimate", "--matrix", str(path))
        assert code == 0
        payload = json.loads(out)
        np.testing.assert_allclose(payload["alpha"], [0.8, 0.3, 0.3],
                                   atol=1e-10)
        assert payload["regime"] == "dominant"

    def test_solve_from_matrix(self, capsys, tmp_path):
        C = build_covariance(canonicalize([0.5, 0.5, 0.5])).matrix
        path = tmp_path / "cov.csv"
        np.savetxt(path, C, delimiter=",")
        code, out, _ = run(capsys, "solve", "--matrix", str(path))
        assert code == 0
        sol = json.loads(out)["solution"]
        np.testing.assert_allclose(sol["d"], [0.75, 0.75, 0.75], atol=1e-9)


class TestExitCodes:
    def test_usage_error_is_1(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["bogus-command"])
        assert err.value.code == 1

    def test_missing_input_is_2(self, capsys):
        code, _, err = run(capsys, "classify")
        assert code == 2
        assert "error" in err

    def test_domain_error_is_2(self, capsys):
        code, _, err = run(capsys, "solve", "--alpha", "1.5,0.3")
        assert code == 2
        assert "alpha" in err or "loading" in err

    def test_both_inputs_is_2(self, capsys, tmp_path):
        path = tmp_path / "cov.csv"
        path.write_text("1,0.2\n0.2,1\n")
        code, _, _ = run(capsys, "classify", "--alpha", "0.5,0.5",
                         "--matrix", str(path))
        assert code == 2
