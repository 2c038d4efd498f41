import numpy as np
import pytest

from pyqsense.engine.readout import ReadoutConfig, ReadoutConfigError, simulate_readout


class TestReadoutConfig(object):
    def test_defaults(self):
        readout = ReadoutConfig()
        assert readout.draws == 1000
        assert readout.penalty == 1.0

    def test_draws(self):
        assert ReadoutConfig(reps=10, sensors=3, m0=4.0).draws == 7
        assert ReadoutConfig(reps=1, m0=5.0).draws == 1

    def test_penalty(self):
        assert ReadoutConfig(m0=4.0, contrast=0.5).penalty == pytest.approx(4.0)

    def test_sigma_p(self):
        assert ReadoutConfig(reps=400).sigma_p() == pytest.approx(1.0 / 40.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"reps": 0},
            {"reps": 2.5},
            {"sensors": 0},
            {"m0": 0.5},
            {"contrast": 0.0},
            {"contrast": 1.5},
            {"seed": -1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ReadoutConfigError):
            ReadoutConfig(**kwargs)

    def test_as_dict(self):
        assert ReadoutConfig(seed=3).as_dict()["seed"] == 3


class TestSimulateReadout(object):
    def test_projection_noise(self, rng):
        """Standard error of p at 1/2 is 1/(2 sqrt(M N)), within 5%."""
        readout = ReadoutConfig(reps=250, sensors=4)
        p_hat, stderr = simulate_readout(np.full(10000, 0.5), readout, rng)
        assert np.std(p_hat) == pytest.approx(1.0 / (2.0 * np.sqrt(1000)), rel=0.05)
        assert np.mean(stderr) == pytest.approx(readout.sigma_p(), rel=0.01)

    def test_scaling_with_reps(self, rng):
        """Spread falls as M^(-1/2)."""
        reps = np.array([100, 1000, 10000, 100000])
        spread = [np.std(simulate_readout(np.full(10000, 0.5), ReadoutConfig(reps=int(m)), rng)[0]) for m in reps]
        slope = np.polyfit(np.log(reps), np.log(spread), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.02)

    def test_contrast_and_m0(self, rng):
        readout = ReadoutConfig(reps=1000, m0=4.0, contrast=0.5)
        p_hat, _ = simulate_readout(np.full(10000, 0.3), readout, rng)
        assert np.mean(p_hat) == pytest.approx(0.3, abs=0.005)
        assert np.std(p_hat) == pytest.approx(readout.sigma_p(0.3), rel=0.05)

    def test_certain_outcomes(self, rng):
        p_hat, stderr = simulate_readout(np.array([0.0, 1.0]), ReadoutConfig(reps=50), rng)
        assert np.array_equal(p_hat, [0.0, 1.0])
        assert np.all(stderr > 0)

    def test_clipped(self, rng):
        p_hat, _ = simulate_readout(np.full(2000, 0.999), ReadoutConfig(reps=10, contrast=0.2), rng)
        assert np.all((p_hat >= 0.0) & (p_hat <= 1.0))
