import numpy as np
import pytest
from scipy.integrate import quad

from pyqsense.common import TWOPI
from pyqsense.noise.model import Constant, PiecewiseConstant, Sinusoid
from pyqsense.sequence.filter import (
    SensitivityFunction,
    filter_spectrum,
    phase_from_signal,
    sensitivity_function,
)
from pyqsense.sequence.model import (
    InvalidSequenceError,
    Pulse,
    PulseKind,
    PulseSequence,
    Delay,
    cpmg,
    hahn,
    ramsey,
)


class TestSensitivityFunction(object):
    def test_ramsey(self):
        g = sensitivity_function(ramsey(1e-6))
        assert np.all(g.signs == [1.0])
        assert g(0.5e-6) == 1.0
        assert g(1.5e-6) == 0.0

    def test_hahn(self):
        g = sensitivity_function(hahn(2e-6))
        assert np.allclose(g.breakpoints, [0.0, 1e-6, 2e-6])
        assert np.all(g.signs == [1.0, -1.0])

    def test_interior_rotation_rejected(self):
        seq = PulseSequence(
            (
                Pulse(PulseKind.PI_HALF),
                Delay(1e-6),
                Pulse(PulseKind.ARBITRARY, "x", 1.0),
                Delay(1e-6),
                Pulse(PulseKind.PI_HALF),
            )
        )
        with pytest.raises(InvalidSequenceError):
            sensitivity_function(seq)

    def test_bad_signs(self):
        with pytest.raises(InvalidSequenceError):
            SensitivityFunction([0.0, 1.0], [0.5])

    def test_transform_matches_quadrature(self):
        g = sensitivity_function(cpmg(3, 1e-6))
        nu = 0.7e6
        re = quad(lambda t: g(t) * np.cos(TWOPI * nu * t), 0, g.total_time, points=g.flip_times, limit=200)[0]
        im = -quad(lambda t: g(t) * np.sin(TWOPI * nu * t), 0, g.total_time, points=g.flip_times, limit=200)[0]
        assert g.transform(nu)[0] == pytest.approx(re + 1j * im, abs=1e-14)


class TestPhase(object):
    @pytest.mark.parametrize("delta_hz", [-10e6, -1e6, 0.0, 3.3e5, 10e6])
    def test_hahn_cancels_static(self, delta_hz):
        g = sensitivity_function(hahn(4e-6))
        assert abs(phase_from_signal(g, Constant(TWOPI * delta_hz))) < 1e-12

    def test_ramsey_accumulates(self):
        g = sensitivity_function(ramsey(2e-6))
        assert phase_from_signal(g, Constant(1e6)) == pytest.approx(2.0)

    @pytest.mark.parametrize("n", [1, 2, 3, 8])
    def test_lock_in_factor(self, n):
        """A tone at 1/(2 tau), in phase with the pulses, gives 2/pi of its DC phase."""
        tau, b = 1e-6, 1e5
        g = sensitivity_function(cpmg(n, tau))
        tone = Sinusoid(b, 0.5 / tau, np.pi / 2)
        assert phase_from_signal(g, tone) / (b * n * tau) == pytest.approx(2 / np.pi, rel=1e-12)

    def test_lock_in_factor_is_the_best_phase(self):
        tau, b, n = 1e-6, 1e5, 4
        g = sensitivity_function(cpmg(n, tau))
        phases = np.linspace(-np.pi, np.pi, 73)
        phis = [abs(phase_from_signal(g, Sinusoid(b, 0.5 / tau, p))) for p in phases]
        assert max(phis) == pytest.approx(2 / np.pi * b * n * tau, rel=1e-12)

    def test_echo_of_step(self):
        """A detuning step at the echo pulse doubles, rather than cancels."""
        g = sensitivity_function(hahn(2e-6))
        signal = PiecewiseConstant((0.0, 1e-6), (1e6, -1e6))
        assert phase_from_signal(g, signal) == pytest.approx(2.0)


class TestFilterSpectrum(object):
    def test_cpmg_peak(self):
        tau = 1e-6
        filt = filter_spectrum(sensitivity_function(cpmg(8, tau)), 1000)
        T = filt.sensitivity.total_time
        assert abs(filt.peak_frequency() - 1.0 / (2.0 * tau)) <= 1.0 / T

    def test_even_cpmg_has_no_dc(self):
        filt = filter_spectrum(sensitivity_function(cpmg(8, 1e-6)), 100)
        T = filt.sensitivity.total_time
        dc = filt.coefficients[filt.harmonics == 0][0]
        assert abs(dc) ** 2 < 1e-18 * T**2

    def test_parseval(self):
        filt = filter_spectrum(sensitivity_function(cpmg(8, 1e-6)), 10000)
        assert filt.parseval_ratio() == pytest.approx(1.0, rel=0.01)

    def test_conjugate_symmetry(self):
        filt = filter_spectrum(sensitivity_function(cpmg(3, 1e-6)), 50)
        assert np.allclose(filt.coefficients[::-1], np.conj(filt.coefficients))

    def test_padding_samples_same_transform(self):
        g = sensitivity_function(cpmg(4, 1e-6))
        coarse = filter_spectrum(g, 64)
        fine = filter_spectrum(g, 256, padding=4.0)
        assert fine.padding == pytest.approx(4.0)
        assert np.allclose(fine.coefficients[fine.harmonics % 4 == 0], coarse.coefficients)

    def test_gain_is_exact(self):
        filt = filter_spectrum(sensitivity_function(ramsey(1e-6)), 10)
        nu = 0.37e6
        expected = (np.sin(np.pi * nu * 1e-6) / (np.pi * nu)) ** 2
        assert filt.gain(nu)[0] == pytest.approx(expected)

    def test_bad_arguments(self):
        g = sensitivity_function(ramsey(1e-6))
        with pytest.raises(ValueError):
            filter_spectrum(g, 0)
        with pytest.raises(ValueError):
            filter_spectrum(g, 10, padding=0.5)
