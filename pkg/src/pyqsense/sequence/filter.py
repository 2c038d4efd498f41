"""Sensitivity functions g(t) and their filter spectra.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Fourier convention: for a signal on an observation window of length ``T_w``,
``f(t) = (1/T_w) sum_n f_n exp(i 2 pi n t / T_w)``, so that
``f_n = integral f(t) exp(-i 2 pi n t / T_w) dt`` and ``S_f(nu_n) = |f_n|^2 / T_w``.
The window defaults to the sequence length ``T``; zero-padding it to ``L T``
samples the same continuous transform ``G(nu)`` on a finer grid.
"""

from dataclasses import dataclass, field

import numpy as np

from pyqsense.common import TWOPI, Cvec, Rvec
from pyqsense.sequence.model import InvalidSequenceError, PulseSequence


@dataclass(frozen=True, eq=False)
class SensitivityFunction:
    """
    Piecewise-constant sign function g(t) on [0, T]; zero outside.

    ``breakpoints`` holds the segment edges (0, flip times..., T) and
    ``signs`` the value (+1 or -1) on each segment.
    """

    breakpoints: Rvec
    signs: Rvec

    def __post_init__(self):
        edges = np.asarray(self.breakpoints, dtype=float)
        signs = np.asarray(self.signs, dtype=float)
        if len(edges) != len(signs) + 1:
            raise InvalidSequenceError("Need exactly one sign per segment.")
        if np.any(np.diff(edges) < 0) or edges[0] != 0.0:
            raise InvalidSequenceError("Breakpoints must start at zero and be ascending.")
        if not np.all(np.abs(signs) == 1):
            raise InvalidSequenceError("Sensitivity function values must be +1 or -1.")
        object.__setattr__(self, "breakpoints", edges)
        object.__setattr__(self, "signs", signs)

    @property
    def total_time(self) -> float:
        "T"
        return float(self.breakpoints[-1])

    @property
    def segments(self) -> list[tuple[float, float, float]]:
        "(start, stop, sign) triples."
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:], self.signs))

    @property
    def flip_times(self) -> Rvec:
        "Interior breakpoints."
        return self.breakpoints[1:-1]

    def __call__(self, t) -> Rvec:
        t = np.asarray(t, dtype=float)
        ix = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0, len(self.signs) - 1)
        inside = (t >= 0) & (t <= self.total_time)
        return np.where(inside, self.signs[ix], 0.0)

    def transform(self, nu) -> Cvec:
        """
        Continuous Fourier transform ``G(nu) = integral g(t) exp(-i 2 pi nu t) dt``.

        Computed segment by segment, in closed form.
        """
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        w = TWOPI * nu[:, None]
        a = self.breakpoints[None, :-1]
        b = self.breakpoints[None, 1:]
        zero = w == 0
        safe_w = np.where(zero, 1.0, w)
        pieces = np.where(
            zero,
            b - a + 0j,
            (np.exp(-1j * safe_w * b) - np.exp(-1j * safe_w * a)) / (-1j * safe_w),
        )
        return pieces @ self.signs


@dataclass(frozen=True, eq=False)
class FilterSpectrum:
    "Fourier coefficients of a sensitivity function, and their power weights."

    harmonics: np.ndarray  # n, -n_max..n_max
    frequencies: Rvec  # nu_n = n / T_w (Hz)
    coefficients: Cvec  # g_n (s)
    weights: Rvec  # S_g(nu_n) = |g_n|^2 / T_w (s)
    window: float  # T_w (s)
    sensitivity: SensitivityFunction = field(repr=False)

    @property
    def n_max(self) -> int:
        "Highest harmonic."
        return int(self.harmonics[-1])

    @property
    def padding(self) -> float:
        "T_w / T"
        return self.window / self.sensitivity.total_time

    def non_negative(self) -> tuple[Rvec, Rvec]:
        "(nu_n, S_g(nu_n)) for n >= 0."
        keep = self.harmonics >= 0
        return self.frequencies[keep], self.weights[keep]

    def parseval_ratio(self) -> float:
        "sum |g_n|^2 / (T_w T); tends to one as n_max grows."
        return float(np.sum(np.abs(self.coefficients) ** 2) / (self.window * self.sensitivity.total_time))

    def peak_frequency(self) -> float:
        "Non-negative frequency of the largest weight."
        nu, s_g = self.non_negative()
        return float(nu[np.argmax(s_g)])

    def gain(self, nu) -> Rvec:
        "|G(nu)|^2, evaluated exactly (not limited to the harmonic grid)."
        return np.abs(self.sensitivity.transform(nu)) ** 2


def sensitivity_function(seq: PulseSequence) -> SensitivityFunction:
    """
    Build g(t) for a sensing sequence, treating pulses as instantaneous.

    g starts at +1 after the opening pi/2 pulse and flips sign at each interior pi pulse.

    Raises:
        InvalidSequenceError: The sequence isn't bracketed by pi/2 pulses,
            or contains an interior pulse other than a pi pulse.
    """
    seq.check_brackets()
    interior = seq.pulses[1:-1]
    for pulse in interior:
        if not pulse.is_pi:
            raise InvalidSequenceError(f"Interior pulse {pulse} is not a pi pulse; g(t) is undefined.")
    flips = seq.pi_times
    edges = np.array([0.0] + flips + [seq.total_time])
    signs = np.array([(-1.0) ** k for k in range(len(flips) + 1)])
    return SensitivityFunction(edges, signs)


def phase_from_signal(g: SensitivityFunction, signal) -> float:
    """
    Accumulated phase ``phi = integral g(t) Delta(t) dt``.

    Args:
        g: Sensitivity function.
        signal: Anything with an exact ``integral(a, b)``: a deterministic
            ``SignalModel`` (integrated analytically per segment),
            or a sampled ``NoiseTrajectory`` (integrated by the trapezoid rule).

    Returns:
        phi (rad); an array, for a batch of trajectories.

    Raises:
        SignalCoverageError: A sampled signal shorter than T.
    """
    return sum(s * signal.integral(a, b) for a, b, s in g.segments)


def filter_spectrum(g: SensitivityFunction, n_max: int, padding: float = 1.0) -> FilterSpectrum:
    """
    Fourier coefficients ``g_n``, for ``|n| <= n_max``, computed segment-analytically.

    Args:
        g: Sensitivity function.
        n_max: Highest harmonic, >= 1.

    Keyword Args:
        padding: Observation window, in units of T (Default = 1).
            Larger values sample ``G(nu)`` more finely.

    Returns:
        The filter spectrum, with ``S_g(nu_n) = |g_n|^2 / T_w``.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be at least one; got {n_max}.")
    if padding < 1:
        raise ValueError(f"Padding must be at least one; got {padding}.")
    window = padding * g.total_time
    harmonics = np.arange(-n_max, n_max + 1)
    freqs = harmonics / window
    positive = g.transform(freqs[n_max:])
    coeffs = np.concatenate([np.conj(positive[:0:-1]), positive])  # g_{-n} = conj(g_n), exactly
    return FilterSpectrum(harmonics, freqs, coeffs, np.abs(coeffs) ** 2 / window, window, g)
