import numpy as np
import pytest

from pyqsense.analysis.spectral import (
    SpectrumError,
    lobe_weight,
    model_spectrum,
    phase_variance,
    predict_coherence,
    predict_population,
    predicted_population,
    reconstruct_spectrum,
    static_envelope,
)
from pyqsense.common import TWOPI
from pyqsense.engine.experiment import coherence_decay_curve
from pyqsense.noise.model import (
    Composite,
    Constant,
    OrnsteinUhlenbeck,
    PiecewiseConstant,
    Sinusoid,
    StaticGaussian,
    UndefinedSpectrumError,
)
from pyqsense.sequence.filter import filter_spectrum, phase_from_signal, sensitivity_function
from pyqsense.sequence.model import (
    Delay,
    Pulse,
    PulseKind,
    PulseSequence,
    SequenceFamily,
    cpmg,
    hahn,
    ramsey,
)


def ou_ramsey_variance(sigma, tau_c, tau):
    "Closed form Ramsey phase variance under Ornstein-Uhlenbeck noise."
    x = tau / tau_c
    return 2.0 * sigma**2 * tau_c**2 * (x - 1.0 + np.exp(-x))


class TestEnvelopes(object):
    def test_static(self, sigma_static):
        assert static_envelope(1.0 / sigma_static, sigma_static) == pytest.approx(np.exp(-0.5))
        assert np.allclose(static_envelope([0.0, 2e-6], sigma_static), [1.0, np.exp(-2.0)])
        with pytest.raises(SpectrumError):
            static_envelope(-1.0, sigma_static)

    def test_predicted_population(self):
        assert predicted_population(0.0) == 1.0
        assert predicted_population(0.0, sign=-1.0) == 0.0
        assert predicted_population(2.0, np.pi / 2) == pytest.approx(0.5)
        with pytest.raises(SpectrumError):
            predicted_population(-1.0)


class TestPrediction(object):
    def test_ramsey_static(self, sigma_static):
        for tau in (0.3e-6, 1e-6, 2e-6):
            expected = 0.5 * (1.0 + static_envelope(tau, sigma_static))
            assert predict_population(ramsey(tau), StaticGaussian(0.0, sigma_static)) == pytest.approx(expected)

    def test_hahn_static(self, sigma_static):
        assert predict_population(hahn(2e-6), StaticGaussian(0.0, sigma_static)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("tau", [0.5e-6, 2e-6, 5e-6, 10e-6])
    def test_ramsey_ou(self, ou_params, tau):
        """Ramsey variance under OU noise against its closed form, within 1%."""
        sigma, tau_c = ou_params
        coherence = predict_coherence(ramsey(tau), OrnsteinUhlenbeck(sigma, tau_c))
        assert -2.0 * np.log(coherence) == pytest.approx(ou_ramsey_variance(sigma, tau_c, tau), rel=0.01)

    def test_deterministic(self):
        assert predict_population(ramsey(1e-6), Constant(0.5 * np.pi * 1e6)) == pytest.approx(0.5)
        assert predict_population(ramsey(1e-6), None) == 1.0

    def test_offset_and_spread(self, sigma_static):
        model = Composite((StaticGaussian(0.0, sigma_static), Constant(np.pi * 1e6)))
        expected = 0.5 * (1.0 - static_envelope(1e-6, sigma_static))
        assert predict_population(ramsey(1e-6), model) == pytest.approx(expected)

    def test_no_spectrum(self, sigma_static):
        model = Composite((StaticGaussian(0.0, sigma_static), PiecewiseConstant((0.0,), (1.0,))))
        with pytest.raises(UndefinedSpectrumError):
            predict_population(ramsey(1e-6), model)

    def test_not_sensing(self):
        seq = PulseSequence((Pulse(PulseKind.PI_HALF), Delay(1e-6), Pulse(PulseKind.PI_HALF, "x")))
        with pytest.raises(SpectrumError):
            predict_population(seq, None)

    def test_tone_variance(self):
        """A random-phase tone contributes A^2/2 |G(f)|^2, the phase average of phi^2."""
        amplitude, freq = TWOPI * 20e3, 250e3
        g = sensitivity_function(cpmg(4, 2e-6))
        var = phase_variance(filter_spectrum(g, 16), Sinusoid(amplitude, freq, None))
        thetas = TWOPI * np.arange(64) / 64
        average = np.mean([phase_from_signal(g, Sinusoid(amplitude, freq, t)) ** 2 for t in thetas])
        assert var == pytest.approx(average, rel=1e-9)

    def test_no_model(self):
        assert phase_variance(filter_spectrum(sensitivity_function(ramsey(1e-6)), 8), None) == 0.0
        assert np.all(model_spectrum(None, [1.0, 2.0]) == 0.0)


class TestReconstruction(object):
    def test_ou_lorentzian(self, ou_params):
        """A CPMG-8 spacing sweep recovers the Lorentzian to 10% over the central decade."""
        model = OrnsteinUhlenbeck(*ou_params)
        tau = np.geomspace(0.5e-6, 50e-6, 30)
        coherence = [predict_coherence(cpmg(8, t), model) for t in tau]
        est = reconstruct_spectrum(tau, coherence, 8)
        assert np.allclose(est.frequencies, 0.5 / tau)
        central = (est.frequencies >= 10**4.5) & (est.frequencies <= 10**5.5)
        assert np.count_nonzero(central) >= 10
        truth = model_spectrum(model, est.frequencies[central])
        assert np.all(np.abs(est.density[central] / truth - 1.0) < 0.10)

    @pytest.mark.slow
    def test_ou_lorentzian_from_simulated_decay(self):
        """The same loop, fed by Monte-Carlo decay data instead of the filter-function prediction.

        Noise strength is chosen so that C stays within (0.05, 0.98) across the sweep,
        where the sampled coherence resolves the phase variance.
        """
        model = OrnsteinUhlenbeck(TWOPI * 10e3, 1e-6)
        nu = np.geomspace(7e3, 150e3, 16)
        tau = np.sort(0.5 / nu)
        curve = coherence_decay_curve(SequenceFamily("cpmg", {"n": 8}), tau, model, realizations=4000, seed=11)
        assert np.all((curve.coherence > 0.05) & (curve.coherence < 0.98))
        est = reconstruct_spectrum(curve.values, curve.coherence, 8)
        central = (est.frequencies >= 1e4) & (est.frequencies <= 1e5)
        assert np.count_nonzero(central) >= 10
        truth = model_spectrum(model, est.frequencies[central])
        assert np.all(np.abs(est.density[central] / truth - 1.0) < 0.10)

    def test_tone_peaks_at_nearest_point(self):
        """A random phase tone shows up at the sweep point whose 1/(2 tau) is closest to it."""
        tone = 50e3
        model = Sinusoid(TWOPI * 5e3, tone, None)
        nu = 10e3 * 1.5 ** np.arange(9)
        tau = np.sort(0.5 / nu)
        curve = coherence_decay_curve(SequenceFamily("cpmg", {"n": 8}), tau, model, realizations=2000, seed=5)
        est = reconstruct_spectrum(curve.values, curve.coherence, 8, iterations=0)
        assert len(est.frequencies) == len(nu)
        nearest = est.frequencies[np.argmin(np.abs(est.frequencies - tone))]
        assert est.frequencies[np.argmax(est.density)] == pytest.approx(nearest)
        assert nearest == pytest.approx(10e3 * 1.5**4)

    def test_zero_noise(self):
        tau = np.geomspace(1e-6, 10e-6, 5)
        est = reconstruct_spectrum(tau, np.ones(5), 8)
        assert np.all(est.density == 0.0)
        assert not est.notes

    def test_lobe_weight(self):
        T = 8e-6
        filt = filter_spectrum(sensitivity_function(cpmg(8, 1e-6)), 2048, padding=4.0)
        assert 0.6 * T < lobe_weight(filt, 0.5e6, 1.0 / T) < 0.85 * T

    def test_decohered_points_excluded(self):
        est = reconstruct_spectrum([1e-6, 2e-6, 4e-6], [0.9, 0.5, 0.0], 4)
        assert len(est.tau) == 2
        assert any("Excluded" in note for note in est.notes)

    def test_main_lobe_only(self):
        est = reconstruct_spectrum([1e-6, 2e-6], [0.9, 0.5], 4, iterations=0)
        assert np.allclose(est.density, -2.0 * np.log([0.9, 0.5]) / est.weights)

    def test_bad_inputs(self):
        with pytest.raises(SpectrumError):
            reconstruct_spectrum([1e-6], [1.5], 8)
        with pytest.raises(SpectrumError):
            reconstruct_spectrum([1e-6, 2e-6], [0.5], 8)
        with pytest.raises(SpectrumError):
            reconstruct_spectrum([1e-6], [0.5], 8, iterations=-1)
