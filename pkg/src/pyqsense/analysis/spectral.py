"""Filter-function analysis: decoherence envelopes, phase variance, and spectrum reconstruction.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

The accumulated phase variance of a sensing sequence, for the symmetric
density convention of ``pyqsense.noise.model``, is

    ``<phi^2> = S_g(0) S(0) + 2 sum_{n>0} S_g(nu_n) S(nu_n) + sum_lines |G(nu_l)|^2 P_l``,

and, for Gaussian noise, the coherence is ``exp(-<phi^2>/2)``.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.interpolate import interp1d

from pyqsense.common import Rvec, table_csv, write_atomic
from pyqsense.noise.model import SignalModel
from pyqsense.sequence.filter import (
    FilterSpectrum,
    SensitivityFunction,
    filter_spectrum,
    phase_from_signal,
    sensitivity_function,
)
from pyqsense.sequence.model import PulseSequence, cpmg

# Relative truncation error tolerated by ``predict_coherence()``.
TRUNCATION_TOL = 0.01

# Harmonic limits for ``predict_coherence()``.
MIN_HARMONICS = 2048
MAX_HARMONICS = 2**18

# Default observation window, in sequence lengths.
DEFAULT_PADDING = 4.0

# Default number of self-consistent refinement passes in ``reconstruct_spectrum()``.
DEFAULT_REFINEMENTS = 20


class SpectrumError(ValueError):
    """Base Exception for all spectral analysis Errors."""


def static_envelope(tau, sigma_delta):
    """
    Ramsey coherence under static Gaussian detuning, ``exp(-sigma^2 tau^2 / 2)``.

    Args:
        tau: Free evolution time(s) (s), >= 0.
        sigma_delta: Detuning standard deviation (rad/s), >= 0.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or sigma_delta < 0:
        raise SpectrumError(f"Need tau >= 0 and sigma >= 0; got tau = {tau}, sigma = {sigma_delta}.")
    res = np.exp(-0.5 * (sigma_delta * tau) ** 2)
    return float(res) if res.ndim == 0 else res


def phase_variance(filt: FilterSpectrum, model: Optional[SignalModel]) -> float:
    """
    Accumulated phase variance, from a filter spectrum and a model's power spectrum.

    The continuous part is summed over the filter's harmonics; line components
    are weighted by ``|G(nu_line)|^2``, evaluated exactly.

    Raises:
        UndefinedSpectrumError: The model has no analytic spectrum.
    """
    if model is None:
        return 0.0
    nu, s_g = filt.non_negative()
    density = np.asarray(model.density(nu), dtype=float)
    var = s_g[0] * density[0] + 2.0 * np.sum(s_g[1:] * density[1:])
    for line in model.lines():
        var += float(filt.gain(line.frequency)[0]) * line.power
    return float(var)


def truncation_error(filt: FilterSpectrum, model: Optional[SignalModel]) -> float:
    """
    Bound on the harmonics dropped above ``n_max``, as a fraction of the phase variance.

    Uses ``|G(nu)| <= K / (pi nu)`` for a ``K`` segment sign function and takes
    the model's density to be non-increasing beyond the last harmonic.
    Returns zero when the variance is zero.
    """
    var = phase_variance(filt, model)
    if var <= 0 or model is None:
        return 0.0
    nu_max = filt.frequencies[-1]
    segments = len(filt.sensitivity.signs)
    tail = 2.0 * segments**2 * float(model.density(nu_max)) / (np.pi**2 * nu_max)
    return tail / var


def predicted_coherence(variance, mean_phase=0.0, sign: float = 1.0):
    """
    Coherence ``C = 2 p - 1`` for a Gaussian phase: ``sign exp(-<phi^2>/2) cos(phi_bar)``.

    Args:
        variance: Phase variance <phi^2>, >= 0.

    Keyword Args:
        mean_phase: Mean phase phi_bar (Default = 0).
        sign: +1 when zero phase ends in |1>, -1 when it ends in |0> (Default = +1).
    """
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise SpectrumError(f"Phase variance must be non-negative; got {variance}.")
    res = sign * np.exp(-0.5 * variance) * np.cos(mean_phase)
    return float(res) if res.ndim == 0 else res


def predicted_population(variance, mean_phase=0.0, sign: float = 1.0):
    "Final |1> population for a Gaussian phase, ``1/2 (1 + C)``; see ``predicted_coherence()``."
    res = 0.5 * (1.0 + np.asarray(predicted_coherence(variance, mean_phase, sign)))
    return float(res) if res.ndim == 0 else res


def zero_phase_sign(seq: PulseSequence) -> float:
    """
    +1 if the ideal pulses send |0> to |1> with no phase accrued, -1 if back to |0>.

    Raises:
        SpectrumError: The pulses leave the qubit off the poles.
    """
    p0 = seq.zero_phase_population()
    if abs(p0 - 1.0) < 1e-9:
        return 1.0
    if p0 < 1e-9:
        return -1.0
    raise SpectrumError(f"Sequence '{seq.name}' doesn't map zero phase to a pole (p = {p0:.3g}).")


def auto_padding(seq: PulseSequence, model: Optional[SignalModel]) -> float:
    "Observation window making the harmonic spacing a tenth of the narrowest noise bandwidth."
    T = seq.total_time
    taus = model.correlation_times if model is not None else ()
    if not taus:
        return DEFAULT_PADDING
    return max(DEFAULT_PADDING, float(np.ceil(10.0 * np.pi * max(taus) / T)))


def predict_coherence(
    seq: PulseSequence,
    model: Optional[SignalModel],
    n_max: Optional[int] = None,
    padding: Optional[float] = None,
) -> float:
    """
    Filter-function prediction of a sequence's noise-averaged coherence, ``C = 2 <p> - 1``.

    The deterministic part of the model sets the mean phase; the fluctuating
    part sets the phase variance. With ``n_max=None`` the harmonic count doubles
    from ``MIN_HARMONICS`` until the truncation bound drops below 1%
    (or ``MAX_HARMONICS`` is reached).

    Computed directly, rather than from the population, so that coherences
    far below machine epsilon keep their relative precision.

    Raises:
        UndefinedSpectrumError: A random model without an analytic spectrum.
        SpectrumError: Not a sensing sequence.
    """
    g = sensitivity_function(seq)
    sign = zero_phase_sign(seq)
    if model is None:
        return predicted_coherence(0.0, 0.0, sign)
    det = model.deterministic_part()
    mean_phase = float(phase_from_signal(g, det)) if det is not None else 0.0
    if model.is_deterministic:
        return predicted_coherence(0.0, mean_phase, sign)
    padding = auto_padding(seq, model) if padding is None else padding
    if n_max is not None:
        return predicted_coherence(phase_variance(filter_spectrum(g, n_max, padding), model), mean_phase, sign)
    harmonics = int(MIN_HARMONICS * padding / DEFAULT_PADDING)
    while True:
        filt = filter_spectrum(g, min(harmonics, MAX_HARMONICS), padding)
        if harmonics >= MAX_HARMONICS or truncation_error(filt, model) < TRUNCATION_TOL:
            break
        harmonics *= 2
    return predicted_coherence(phase_variance(filt, model), mean_phase, sign)


def predict_population(
    seq: PulseSequence,
    model: Optional[SignalModel],
    n_max: Optional[int] = None,
    padding: Optional[float] = None,
) -> float:
    "Filter-function prediction of the noise-averaged |1> population; see ``predict_coherence()``."
    return 0.5 * (1.0 + predict_coherence(seq, model, n_max, padding))


#####
# Spectrum reconstruction
#####


def lobe_weight(filt: FilterSpectrum, center: float, half_width: float) -> float:
    """
    Filter weight within ``|nu - center| <= half_width``, counting both signs of ``nu``.

    ``W = S_g(0) [if in band] + 2 sum_{n>0, in band} S_g(nu_n)``.
    """
    nu, s_g = filt.non_negative()
    band = np.abs(nu - center) <= half_width * (1 + 1e-12)
    scale = np.where(nu == 0, 1.0, 2.0)
    return float(np.sum((scale * s_g)[band]))


class _SpectrumCurve:
    "Log-log interpolant of spectrum estimates; flat below the data, power-law above."

    def __init__(self, nu: Rvec, density: Rvec):
        order = np.argsort(nu)
        self.nu = np.asarray(nu)[order]
        self.log_nu = np.log(self.nu)
        self.log_s = np.log(np.asarray(density)[order])
        self.inner = interp1d(self.log_nu, self.log_s, kind="linear", assume_sorted=True)
        slope = (self.log_s[-1] - self.log_s[-2]) / (self.log_nu[-1] - self.log_nu[-2])
        self.tail_slope = min(slope, 0.0)

    def __call__(self, nu: Rvec) -> Rvec:
        nu = np.asarray(nu, dtype=float)
        log_nu = np.log(np.clip(nu, self.nu[0], None))
        res = np.empty_like(log_nu)
        above = log_nu > self.log_nu[-1]
        inside = ~above
        res[inside] = self.inner(np.clip(log_nu[inside], self.log_nu[0], self.log_nu[-1]))
        res[above] = self.log_s[-1] + self.tail_slope * (log_nu[above] - self.log_nu[-1])
        return np.exp(res)


@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    "Reconstructed detuning spectrum, one estimate per usable sweep point."

    frequencies: Rvec  # Hz, 1/(2 tau)
    density: Rvec  # (rad/s)^2/Hz
    tau: Rvec  # s
    coherence: Rvec
    weights: Rvec  # main lobe filter weight W (s)
    pulses: int
    notes: tuple[str, ...] = field(default=())

    def table(self) -> tuple[list[str], np.ndarray]:
        "(headers, rows)"
        return (
            ["nu_hz", "S_est_rad2_per_s2_per_hz", "tau_s", "C", "W_s"],
            np.column_stack([self.frequencies, self.density, self.tau, self.coherence, self.weights]),
        )

    def to_csv(self) -> str:
        "CSV text."
        return table_csv(*self.table())

    def write_csv(self, path) -> None:
        "Export to CSV."
        write_atomic(path, self.to_csv())


def reconstruct_spectrum(
    tau,
    coherence,
    n: int,
    iterations: int = DEFAULT_REFINEMENTS,
    padding: float = DEFAULT_PADDING,
    sensitivities: Optional[list[SensitivityFunction]] = None,
) -> SpectrumEstimate:
    """
    Estimate the detuning spectrum from a CPMG coherence decay.

    Each point gives ``<phi^2> = -2 ln C`` and a first estimate
    ``S(1/(2 tau)) = <phi^2> / W``, with ``W`` the main lobe weight
    (band ``|nu - 1/(2 tau)| <= 1/T``) of that point's own filter spectrum.
    Refinement passes then scale each estimate by measured over predicted
    ``<phi^2>``, with the prediction summing the whole filter spectrum against
    a log-log interpolant of the current estimates.

    Args:
        tau: Pulse spacings (s).
        coherence: Measured C at each spacing.
        n: CPMG pulse count, fixed across the sweep.

    Keyword Args:
        iterations: Refinement passes (Default = 20). Zero returns the single step
            estimator ``-2 ln C / W`` untouched, leakage from outside the main lobe included.
        padding: Observation window, in sequence lengths (Default = 4).
        sensitivities: Sensitivity functions of the measured sequences, if not ``cpmg(n, tau)``.

    Returns:
        Estimates at ``nu = 1/(2 tau)`` for every point with C > 0; excluded points are noted.

    Raises:
        SpectrumError: Mismatched inputs, or C > 1.
    """
    tau = np.asarray(tau, dtype=float)
    coherence = np.asarray(coherence, dtype=float)
    if tau.shape != coherence.shape or tau.ndim != 1 or not len(tau):
        raise SpectrumError("Need matching, non-empty tau and coherence vectors.")
    if np.any(coherence > 1.0 + 1e-12):
        raise SpectrumError(f"Coherence can't exceed one; got {coherence.max()!r}.")
    if iterations < 0:
        raise SpectrumError(f"Refinement count must be non-negative; got {iterations}.")
    notes = []
    keep = coherence > 0
    for t, c in zip(tau[~keep], coherence[~keep]):
        notes.append(f"Excluded tau = {t:.6g} s: C = {c:.3g} is fully decohered.")
    if sensitivities is None:
        gs = [sensitivity_function(cpmg(n, t)) for t in tau]
    else:
        gs = list(sensitivities)
    tau, coherence = tau[keep], np.minimum(coherence[keep], 1.0)
    gs = [g for g, k in zip(gs, keep) if k]
    if not len(tau):
        return SpectrumEstimate(*(np.zeros(0),) * 5, n, tuple(notes))
    n_max = int(64 * n * padding)
    filters = [filter_spectrum(g, n_max, padding) for g in gs]
    centers = 0.5 / tau
    weights = np.array([lobe_weight(f, nu0, 1.0 / f.sensitivity.total_time) for f, nu0 in zip(filters, centers)])
    variance = -2.0 * np.log(coherence)
    density = variance / weights
    if iterations and len(tau) >= 2 and np.all(density > 0):
        for _ in range(iterations):
            curve = _SpectrumCurve(centers, density)
            predicted = np.array([_variance_on_curve(f, curve) for f in filters])
            density = density * variance / predicted
    elif iterations and np.any(density > 0):
        notes.append("Refinement skipped: it needs two or more points with positive estimates.")
    return SpectrumEstimate(centers, density, tau, coherence, weights, n, tuple(notes))


def _variance_on_curve(filt: FilterSpectrum, curve: _SpectrumCurve) -> float:
    nu, s_g = filt.non_negative()
    dens = curve(nu)
    return float(s_g[0] * dens[0] + 2.0 * np.sum(s_g[1:] * dens[1:]))


def model_spectrum(model: Optional[SignalModel], nu) -> Union[float, Rvec]:
    "Analytic density at ``nu`` for overlays; zero for no model."
    nu = np.asarray(nu, dtype=float)
    if model is None:
        return np.zeros_like(nu)
    return np.asarray(model.density(nu), dtype=float)
