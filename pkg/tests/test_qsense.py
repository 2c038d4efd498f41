import json

import numpy as np
import pytest
from click.testing import CliRunner

from pyqsense.common import TWOPI
from pyqsense.tools.qsense import family_from_token, main, merge_options, run_replay


def read_csv(path):
    "(headers, rows) of a result CSV file."
    with open(path, encoding="utf-8") as csv_file:
        headers = csv_file.readline().strip().split(",")
    return headers, np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def out(tmp_path):
    return tmp_path / "out"


class TestOptions(object):
    def test_family_suffix(self):
        family = family_from_token("cpmg8", {})
        assert family.builder == "cpmg"
        assert family.params == {"n": 8}

    def test_family_lenient(self):
        assert family_from_token("hahn", {"n": 8.0, "tau": 1e-6}, strict=False).params == {"tau": 1e-6}

    def test_precedence(self, decay_run_file):
        kwargs = {"builder": (), "param": (), "sweep": None, "decay": None, "format": "json", "seed": None}
        options = merge_options("decay", {"config": str(decay_run_file), **kwargs})
        assert options["format"] == "json"
        assert options["sweep"] == "tau=1us:20us:5"
        assert options["seed"] == 0
        assert options["builder"] == ["cpmg"]

    def test_wrong_command(self, decay_run_file):
        with pytest.raises(ValueError, match="configures 'decay'"):
            merge_options("fringes", {"config": str(decay_run_file), "sweep": None})


class TestFringes(object):
    def test_detuning_fringes(self, runner, out):
        """1 us Ramsey fringes repeat every 1 MHz of detuning."""
        result = runner.invoke(
            main, ["fringes", "-p", "tau=1us", "-x", "detuning=-2M:2M:41", "-o", str(out), "--format", "csv"]
        )
        assert result.exit_code == 0, result.output
        headers, rows = read_csv(out / "fringes.csv")
        assert headers == ["detuning_rad_per_s", "p_true", "p_hat", "stderr"]
        assert np.allclose(rows[:, 0] / TWOPI, np.linspace(-2e6, 2e6, 41))
        assert np.allclose(rows[:, 1], 0.5 * (1.0 + np.cos(rows[:, 0] * 1e-6)), atol=1e-12)
        assert not (out / "fringes.json").exists()

    def test_flat_without_detuning(self, runner, out):
        result = runner.invoke(main, ["fringes", "-x", "tau=0.1us:2us:20", "-o", str(out)])
        assert result.exit_code == 0, result.output
        _, rows = read_csv(out / "fringes.csv")
        assert np.allclose(rows[:, 1], 1.0)
        doc = json.loads((out / "fringes.json").read_text())
        assert doc["config"]["command"] == "fringes"
        assert doc["config"]["builder"] == ["ramsey"]

    def test_sequence_file(self, runner, out, hahn_seq_file):
        result = runner.invoke(main, ["fringes", "-s", str(hahn_seq_file), "-x", "detuning=-5M,0,5M", "-o", str(out)])
        assert result.exit_code == 0, result.output
        _, rows = read_csv(out / "fringes.csv")
        assert np.allclose(rows[:, 1], 1.0)

    def test_missing_file(self, runner, out, tmp_path):
        result = runner.invoke(main, ["fringes", "-s", str(tmp_path / "nope.seq"), "-x", "detuning=0", "-o", str(out)])
        assert result.exit_code != 0
        assert not out.exists()

    def test_file_and_builder(self, runner, out, hahn_seq_file):
        result = runner.invoke(
            main, ["fringes", "-s", str(hahn_seq_file), "-b", "ramsey", "-x", "detuning=0", "-o", str(out)]
        )
        assert result.exit_code == 1
        assert "not both" in result.output

    def test_out_is_a_file(self, runner, tmp_path):
        target = tmp_path / "taken"
        target.write_text("")
        result = runner.invoke(main, ["fringes", "-x", "tau=1us,2us", "-o", str(target)])
        assert result.exit_code != 0

    def test_bad_sweep(self, runner, out):
        result = runner.invoke(main, ["fringes", "-x", "tau=oops", "-o", str(out)])
        assert result.exit_code == 1
        assert "Bad sweep" in result.output

    def test_needs_sweep(self, runner, out):
        result = runner.invoke(main, ["fringes", "-o", str(out)])
        assert result.exit_code == 1
        assert "needs a sweep" in result.output


class TestDecay(object):
    def test_static_ramsey(self, runner, out, static_noise_file):
        result = runner.invoke(
            main,
            [
                "decay",
                "-b",
                "ramsey",
                "-b",
                "hahn",
                "-n",
                str(static_noise_file),
                "-x",
                "T=0.1us:3us:30",
                "--decay",
                "analytic",
                "-o",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        headers, rows = read_csv(out / "decay.csv")
        assert headers == ["T_s", "T_s_ramsey", "C_ramsey", "T_s_hahn", "C_hahn"]
        assert np.allclose(rows[:, 2], np.exp(-0.5 * (1e6 * rows[:, 0]) ** 2))
        assert np.allclose(rows[:, 4], 1.0)
        doc = json.loads((out / "decay.json").read_text())
        assert doc["metadata"]["decay_time_s"]["ramsey"] == pytest.approx(np.sqrt(2.0) * 1e-6, rel=0.02)

    def test_run_file(self, runner, out, decay_run_file, ou_noise_file):
        result = runner.invoke(main, ["decay", "--config", str(decay_run_file), "-n", str(ou_noise_file), "-o", str(out)])
        assert result.exit_code == 0, result.output
        headers, rows = read_csv(out / "decay.csv")
        assert headers == ["tau_s", "T_s_cpmg8", "C_cpmg8"]
        assert rows.shape == (5, 3)
        assert np.all(np.diff(rows[:, 2]) < 0)
        assert not (out / "decay.json").exists()

    def test_fixed_sequence_rejected(self, runner, out, hahn_seq_file):
        result = runner.invoke(main, ["decay", "-s", str(hahn_seq_file), "-x", "tau=1us,2us", "-o", str(out)])
        assert result.exit_code == 1


class TestSpectrum(object):
    def test_zero_noise(self, runner, out):
        result = runner.invoke(main, ["spectrum", "-x", "tau=1us:10us:5", "-o", str(out), "--format", "csv"])
        assert result.exit_code == 0, result.output
        headers, rows = read_csv(out / "spectrum.csv")
        assert headers[-1] == "S_model_rad2_per_s2_per_hz"
        assert np.all(rows[:, 1] == 0.0)
        assert np.all(rows[:, -1] == 0.0)

    def test_ou_overlay(self, runner, out, ou_noise_file):
        result = runner.invoke(
            main, ["spectrum", "-n", str(ou_noise_file), "-x", "tau=0.5us:50us:30:log", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "spectrum.json").read_text())
        nu = np.array(doc["columns"]["nu_hz"])
        estimate = np.array(doc["columns"]["S_est_rad2_per_s2_per_hz"])
        overlay = np.array(doc["columns"]["S_model_rad2_per_s2_per_hz"])
        central = (nu >= 10**4.5) & (nu <= 10**5.5)
        assert np.all(np.abs(estimate[central] / overlay[central] - 1.0) < 0.10)

    @pytest.mark.slow
    def test_simulated_decay_overlay(self, runner, out, tmp_path):
        noise_file = tmp_path / "weak_ou.noise"
        noise_file.write_text("(ou (sigma_hz 10k) (tau_c_s 1u))\n", encoding="utf-8")
        result = runner.invoke(
            main,
            [
                "spectrum",
                "-n",
                str(noise_file),
                "-x",
                "tau=3.333us:71.43us:16:log",
                "--decay",
                "simulated",
                "-R",
                "4000",
                "--seed",
                "11",
                "-o",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "spectrum.json").read_text())
        assert doc["metadata"]["decay"] == "simulated"
        nu = np.array(doc["columns"]["nu_hz"])
        estimate = np.array(doc["columns"]["S_est_rad2_per_s2_per_hz"])
        overlay = np.array(doc["columns"]["S_model_rad2_per_s2_per_hz"])
        central = (nu >= 1e4) & (nu <= 1e5)
        assert np.count_nonzero(central) >= 10
        assert np.all(np.abs(estimate[central] / overlay[central] - 1.0) < 0.10)

    def test_odd_count(self, runner, out):
        result = runner.invoke(main, ["spectrum", "-b", "cpmg3", "-x", "tau=1us:4us:4", "-o", str(out)])
        assert result.exit_code == 0, result.output

    def test_needs_cpmg(self, runner, out):
        result = runner.invoke(main, ["spectrum", "-b", "ramsey", "-x", "tau=1us:4us:4", "-o", str(out)])
        assert result.exit_code == 1


class TestSense(object):
    def test_estimates(self, runner, out):
        result = runner.invoke(main, ["sense", "-K", "1000", "-o", str(out)])
        assert result.exit_code == 0, result.output
        doc = json.loads((out / "sense.json").read_text())
        meta = doc["metadata"]
        assert meta["coverage_3sigma"] >= 0.99
        assert meta["dc"]["eta_ideal"] == pytest.approx(5.305e-9, rel=1e-3)
        assert meta["tau_s"] == pytest.approx(1e-6 / np.sqrt(2.0))
        b_hat = np.array(doc["columns"]["B_hat_T"])
        assert np.mean(b_hat) == pytest.approx(1e-6, abs=30e-9)
        headers, rows = read_csv(out / "sense_precision.csv")
        assert headers == ["t_total_s", "sigma_B_T"]
        assert np.allclose(rows[:, 1], meta["dc"]["eta"] / np.sqrt(rows[:, 0]))
        report = (out / "sense_report.md").read_text()
        assert "# Field Estimation Report" in report
        assert "single_nv" in report

    def test_penalty_reported(self, runner, out):
        result = runner.invoke(main, ["sense", "--m0", "4", "-c", "0.5", "-o", str(out), "--format", "json"])
        assert result.exit_code == 0, result.output
        meta = json.loads((out / "sense.json").read_text())["metadata"]
        assert meta["dc"]["eta"] == pytest.approx(4.0 * meta["dc"]["eta_ideal"])
        assert "readout penalty" in result.output
        assert "readout penalty" in (out / "sense_report.md").read_text()

    def test_with_noise(self, runner, out, static_noise_file):
        result = runner.invoke(main, ["sense", "-n", str(static_noise_file), "-R", "20000", "-K", "200", "-o", str(out)])
        assert result.exit_code == 0, result.output
        meta = json.loads((out / "sense.json").read_text())["metadata"]
        assert meta["envelope"] == pytest.approx(np.exp(-0.25))
        assert meta["coverage_3sigma"] >= 0.95

    def test_nothing_written_on_failure(self, runner, out, monkeypatch):
        """A report that fails to render leaves no partial set of outputs behind."""

        def broken(name, **env):
            raise OSError(f"cannot render {name}")

        monkeypatch.setattr("pyqsense.tools.qsense.render_template", broken)
        result = runner.invoke(main, ["sense", "-K", "10", "-o", str(out)])
        assert result.exit_code == 1
        assert "cannot render" in result.output
        assert not list(out.glob("sense*"))


class TestOdmr(object):
    def test_dip(self, runner, out):
        result = runner.invoke(main, ["odmr", "-x", "freq=2.8G:2.95G:301", "-B", "1m", "-o", str(out)])
        assert result.exit_code == 0, result.output
        headers, rows = read_csv(out / "odmr.csv")
        assert headers == ["omega_rad_per_s", "freq_hz", "fluorescence"]
        assert rows[np.argmin(rows[:, 2]), 1] == pytest.approx(2.90e9)
        assert rows[:, 2].min() == pytest.approx(0.7)

    def test_needs_frequency_sweep(self, runner, out):
        result = runner.invoke(main, ["odmr", "-x", "tau=1us,2us", "-o", str(out)])
        assert result.exit_code == 1


class TestValidate(object):
    def test_matched(self, runner, hahn_seq_file):
        result = runner.invoke(main, ["validate", "-s", str(hahn_seq_file), "-v"])
        assert result.exit_code == 0, result.output
        assert "phase matched." in result.output
        assert "pi y" in result.output

    def test_not_matched(self, runner, tmp_path):
        seq_file = tmp_path / "bad.seq"
        seq_file.write_text("p2 y\nwait 1us\npi y\nwait 1us\np2 y\n")
        result = runner.invoke(main, ["validate", "-s", str(seq_file)])
        assert result.exit_code == 0, result.output
        assert "NOT phase matched" in result.output

    def test_syntax_error(self, runner, tmp_path):
        seq_file = tmp_path / "typo.seq"
        seq_file.write_text("p2 y\nwait 1us\npi w\np2 y\n")
        result = runner.invoke(main, ["validate", "-s", str(seq_file)])
        assert result.exit_code == 1
        assert "line 3" in result.output

    def test_noise_and_sweep(self, runner, ou_noise_file):
        result = runner.invoke(main, ["validate", "-b", "cpmg8", "-n", str(ou_noise_file), "-x", "tau=1us:2us:3"])
        assert result.exit_code == 0, result.output
        assert "OrnsteinUhlenbeck" in result.output
        assert "3 point(s)" in result.output


class TestReplay(object):
    def test_byte_identical(self, runner, tmp_path, ou_noise_file):
        first, second = tmp_path / "first", tmp_path / "second"
        args = ["fringes", "-n", str(ou_noise_file), "-x", "tau=1us:3us:3", "-R", "500", "--seed", "17"]
        result = runner.invoke(main, args + ["-o", str(first)])
        assert result.exit_code == 0, result.output
        ou_noise_file.unlink()
        result = runner.invoke(main, ["replay", str(first / "fringes.json"), "-o", str(second)])
        assert result.exit_code == 0, result.output
        assert (first / "fringes.csv").read_bytes() == (second / "fringes.csv").read_bytes()

    def test_not_a_result(self, runner, tmp_path):
        bogus = tmp_path / "bogus.json"
        bogus.write_text("[1, 2]")
        result = runner.invoke(main, ["replay", str(bogus)])
        assert result.exit_code == 1

    def test_notes_on_stderr(self, runner, tmp_path, capsys):
        first = tmp_path / "first"
        result = runner.invoke(main, ["odmr", "-x", "freq=2.8G:2.95G:301", "-B", "1m", "-o", str(first)])
        assert result.exit_code == 0, result.output
        files = run_replay(str(first / "odmr.json"), str(tmp_path / "again"))
        captured = capsys.readouterr()
        assert "Note: Dip at" in captured.err
        assert "Note" not in captured.out
        assert all(f"Wrote: {path}" in captured.out for path in files)
