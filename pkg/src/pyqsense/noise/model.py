"""Signal models for the detuning process, their realizations, and their spectra.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Spectral convention:

    ``density(nu)``, for ``nu >= 0``, is the symmetric (two-sided) power spectral
    density of the fluctuating part of the signal, in (rad/s)^2/Hz.
    The total fluctuating power is ``2 * integral_0^inf density(nu) dnu``.
    Components with all their power at one frequency (the per-shot static offset,
    a random-phase tone) are reported as ``SpectralLine`` pairs instead,
    carrying their integrated power. Deterministic components carry no power.

    With this convention, the accumulated phase variance for a sensitivity
    function with Fourier transform ``G`` is
    ``integral |G(nu)|^2 density(|nu|) dnu + sum_lines |G(nu_l)|^2 power_l``.

All frequencies given to models are in Hz; all signal values are in rad/s.
"""

from dataclasses import dataclass
from functools import cached_property
from io import StringIO
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.fft import rfft, rfftfreq
from scipy.signal import lfilter

from pyqsense.common import TWOPI, Rvec, write_atomic

# Minimum number of trajectories for a periodogram estimate.
MIN_PERIODOGRAM_TRAJECTORIES = 100

# Coarsest permitted OU sample step, in correlation times.
OU_MAX_STEP = 0.1


class NoiseModelError(ValueError):
    """Base Exception for all noise model Errors."""


class UndefinedSpectrumError(NoiseModelError):
    """The model has no analytic power spectral density."""


class SignalCoverageError(NoiseModelError):
    """A realization doesn't cover the requested time span."""


@dataclass(frozen=True)
class SpectralLine:
    "Power concentrated at a single frequency."

    frequency: float  # Hz
    power: float  # (rad/s)^2


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    "Continuous density on a frequency grid, plus any line components."

    frequencies: Rvec  # Hz
    density: Rvec  # (rad/s)^2/Hz
    lines: tuple[SpectralLine, ...] = ()


#####
# Realizations: batches of concrete signal instances, with exact integrals.
#####


class Realization:
    """
    A batch of ``count`` concrete signal instances.

    ``integral(a, b)`` and ``value(t)`` return one entry per instance.
    """

    count: int = 1

    def integral(self, a: float, b: float) -> Rvec:
        "Exact integral of each instance over [a, b]."
        raise NotImplementedError

    def value(self, t: float) -> Rvec:
        "Each instance's value at time ``t``."
        raise NotImplementedError

    def mean(self, a: float, b: float) -> Rvec:
        "Mean value over [a, b] (the point value, when a == b)."
        if b > a:
            return self.integral(a, b) / (b - a)
        return self.value(a)


class DeterministicRealization(Realization):
    "The same deterministic signal, repeated."

    def __init__(self, model: "SignalModel", count: int = 1):
        self.model = model
        self.count = count

    def integral(self, a, b):
        return np.full(self.count, self.model.integral(a, b))

    def value(self, t):
        return np.full(self.count, float(self.model.value(t)))


class ConstantRealization(Realization):
    "One constant value per instance."

    def __init__(self, values: Rvec):
        self.values = np.asarray(values, dtype=float)
        self.count = len(self.values)

    def integral(self, a, b):
        return self.values * (b - a)

    def value(self, t):
        return self.values.copy()


def _sine_integral(amplitude, frequency, phase, a, b):
    "integral_a^b amplitude sin(2 pi frequency t + phase) dt"
    w = TWOPI * frequency
    return amplitude / w * (np.cos(w * a + phase) - np.cos(w * b + phase))


class SinusoidRealization(Realization):
    "One sinusoid per instance, differing only in phase."

    def __init__(self, amplitude: float, frequency: float, phases: Rvec):
        self.amplitude = amplitude
        self.frequency = frequency
        self.phases = np.asarray(phases, dtype=float)
        self.count = len(self.phases)

    def integral(self, a, b):
        return _sine_integral(self.amplitude, self.frequency, self.phases, a, b)

    def value(self, t):
        return self.amplitude * np.sin(TWOPI * self.frequency * t + self.phases)


class SumRealization(Realization):
    "Instance-wise sum of several realizations."

    def __init__(self, parts: Sequence[Realization]):
        self.parts = tuple(parts)
        self.count = max(p.count for p in self.parts)

    def integral(self, a, b):
        return sum(p.integral(a, b) for p in self.parts)

    def value(self, t):
        return sum(p.value(t) for p in self.parts)


@dataclass(frozen=True, eq=False)
class NoiseTrajectory(Realization):
    """
    Uniformly sampled detuning trajectories.

    ``values`` is either one trajectory, shape ``(n,)``, or a batch, shape ``(count, n)``.
    Between samples, the signal is taken to be the linear interpolant,
    so ``integral()`` is trapezoidal quadrature, exact at partial steps too.
    """

    times: Rvec  # s
    values: Rvec  # rad/s
    seed: Optional[int] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise NoiseModelError("A trajectory needs at least two sample times.")
        if values.shape[-1] != len(times):
            raise NoiseModelError(f"Sample count mismatch: {len(times)} times vs. values shape {values.shape}.")
        steps = np.diff(times)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise NoiseModelError("Trajectory sample times must be uniformly spaced and increasing.")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def dt(self) -> float:
        "Sample step."
        return float(self.times[1] - self.times[0])

    @property
    def duration(self) -> float:
        "Time span covered."
        return float(self.times[-1] - self.times[0])

    @property
    def count(self) -> int:  # type: ignore[override]
        "Number of trajectories."
        return 1 if self.values.ndim == 1 else self.values.shape[0]

    @property
    def batch(self) -> Rvec:
        "Values as a (count, n) array."
        return np.atleast_2d(self.values)

    def __getitem__(self, ix) -> "NoiseTrajectory":
        return NoiseTrajectory(self.times, self.batch[ix], self.seed)

    @cached_property
    def _cumulative(self) -> Rvec:
        v = self.batch
        steps = 0.5 * (v[:, 1:] + v[:, :-1]) * self.dt
        return np.concatenate([np.zeros((v.shape[0], 1)), np.cumsum(steps, axis=1)], axis=1)

    def covers(self, a: float, b: float) -> bool:
        "Does the sampled span include [a, b]?"
        slack = 1e-9 * self.dt
        return self.times[0] - slack <= a <= b <= self.times[-1] + slack

    def _antiderivative(self, t: float) -> Rvec:
        u = (t - self.times[0]) / self.dt
        i = int(np.clip(np.floor(u), 0, len(self.times) - 2))
        frac = t - self.times[i]
        v = self.batch
        slope = (v[:, i + 1] - v[:, i]) / self.dt
        return self._cumulative[:, i] + v[:, i] * frac + 0.5 * slope * frac**2

    def integral(self, a, b):
        if not self.covers(a, b):
            raise SignalCoverageError(
                f"Trajectory spans [{self.times[0]}, {self.times[-1]}] s; [{a}, {b}] s was requested."
            )
        res = self._antiderivative(b) - self._antiderivative(a)
        return res if self.values.ndim == 2 else res[0]

    def value(self, t):
        if not self.covers(t, t):
            raise SignalCoverageError(f"Trajectory spans [{self.times[0]}, {self.times[-1]}] s; t = {t} s requested.")
        res = np.array([np.interp(t, self.times, row) for row in self.batch])
        return res if self.values.ndim == 2 else res[0]

    def to_csv(self) -> str:
        "CSV text: a time column, then one column per trajectory."
        if self.values.ndim == 1:
            header = "t_s,delta_rad_per_s"
        else:
            header = "t_s," + ",".join(f"delta_{k}_rad_per_s" for k in range(self.count))
        buf = StringIO()
        np.savetxt(buf, np.column_stack([self.times, self.batch.T]), fmt="%.17g", delimiter=",", header=header, comments="")
        return buf.getvalue()

    def write_csv(self, path: Union[str, Path]) -> Path:
        "Export to a CSV file."
        return write_atomic(path, self.to_csv())


#####
# Models
#####


class SignalModel:
    """
    Base class for detuning process models.

    Subclasses are immutable value types.
    """

    @property
    def is_deterministic(self) -> bool:
        "Is every realization the same?"
        return False

    @property
    def variance(self) -> float:
        "Total fluctuating power, (rad/s)^2."
        return 0.0

    @property
    def correlation_times(self) -> tuple[float, ...]:
        "Correlation times of any colored-noise components."
        return ()

    def sample(self, times: Rvec, count: int, rng: np.random.Generator) -> Rvec:
        "Values at the given (uniform) sample times, shape (count, len(times))."
        raise NotImplementedError

    def realize(self, count: int, rng: np.random.Generator, T: float, dt: float) -> Realization:
        """
        Draw ``count`` instances, covering [0, T].

        ``dt`` is only used by models that must be sampled on a grid.
        """
        if self.is_deterministic:
            return DeterministicRealization(self, count)
        times = sample_times(T, dt)
        return NoiseTrajectory(times, self.sample(times, count, rng))

    def integral(self, a: float, b: float) -> float:
        "Exact integral over [a, b]; deterministic models only."
        raise NoiseModelError(f"{type(self).__name__} is random; sample it to integrate.")

    def value(self, t: float) -> float:
        "Value at time ``t``; deterministic models only."
        raise NoiseModelError(f"{type(self).__name__} is random; sample it to evaluate.")

    def density(self, nu) -> Rvec:
        "Continuous power spectral density at ``nu >= 0`` (Hz)."
        return np.zeros_like(np.asarray(nu, dtype=float))

    def lines(self) -> tuple[SpectralLine, ...]:
        "Line components."
        return ()

    def deterministic_part(self) -> Optional["SignalModel"]:
        "The component every realization shares (e.g. a static mean), if any."
        return self if self.is_deterministic else None


@dataclass(frozen=True)
class Constant(SignalModel):
    "Fixed detuning."

    detuning: float  # rad/s

    @property
    def is_deterministic(self):
        return True

    def sample(self, times, count, rng):
        return np.full((count, len(times)), self.detuning)

    def integral(self, a, b):
        return self.detuning * (b - a)

    def value(self, t):
        return self.detuning


@dataclass(frozen=True)
class StaticGaussian(SignalModel):
    "Detuning drawn once per shot from N(mean, sigma^2) and held for the whole sequence."

    mean: float  # rad/s
    sigma: float  # rad/s

    def __post_init__(self):
        if self.sigma < 0:
            raise NoiseModelError(f"Standard deviation must be non-negative; got {self.sigma}.")

    @property
    def is_deterministic(self):
        return self.sigma == 0

    @property
    def variance(self):
        return self.sigma**2

    def draw(self, count: int, rng: np.random.Generator) -> Rvec:
        "One value per shot."
        return self.mean + self.sigma * rng.standard_normal(count)

    def sample(self, times, count, rng):
        return np.repeat(self.draw(count, rng)[:, None], len(times), axis=1)

    def realize(self, count, rng, T, dt):
        if self.is_deterministic:
            return DeterministicRealization(self, count)
        return ConstantRealization(self.draw(count, rng))

    def integral(self, a, b):
        if not self.is_deterministic:
            return super().integral(a, b)
        return self.mean * (b - a)

    def value(self, t):
        if not self.is_deterministic:
            return super().value(t)
        return self.mean

    def lines(self):
        return (SpectralLine(0.0, self.sigma**2),) if self.sigma > 0 else ()

    def deterministic_part(self):
        return Constant(self.mean)


@dataclass(frozen=True)
class Sinusoid(SignalModel):
    """
    AC signal ``amplitude sin(2 pi frequency t + phase)``.

    ``phase=None`` draws a uniform phase per shot.
    """

    amplitude: float  # rad/s
    frequency: float  # Hz
    phase: Optional[float] = 0.0  # rad

    def __post_init__(self):
        if self.amplitude < 0:
            raise NoiseModelError(f"Amplitude must be non-negative; got {self.amplitude}.")
        if not self.frequency > 0:
            raise NoiseModelError(f"Frequency must be positive; got {self.frequency}.")

    @property
    def random_phase(self) -> bool:
        "Is the phase drawn per shot?"
        return self.phase is None

    @property
    def is_deterministic(self):
        return not self.random_phase

    @property
    def variance(self):
        return 0.5 * self.amplitude**2 if self.random_phase else 0.0

    def _phases(self, count, rng):
        if self.random_phase:
            return rng.uniform(0.0, TWOPI, count)
        return np.full(count, self.phase)

    def sample(self, times, count, rng):
        phases = self._phases(count, rng)
        return self.amplitude * np.sin(TWOPI * self.frequency * np.asarray(times)[None, :] + phases[:, None])

    def realize(self, count, rng, T, dt):
        return SinusoidRealization(self.amplitude, self.frequency, self._phases(count, rng))

    def integral(self, a, b):
        if self.random_phase:
            return super().integral(a, b)
        return float(_sine_integral(self.amplitude, self.frequency, self.phase, a, b))

    def value(self, t):
        if self.random_phase:
            return super().value(t)
        return self.amplitude * np.sin(TWOPI * self.frequency * t + self.phase)

    def lines(self):
        return (SpectralLine(self.frequency, 0.5 * self.amplitude**2),) if self.random_phase else ()


@dataclass(frozen=True)
class OrnsteinUhlenbeck(SignalModel):
    "Stationary, zero mean, exponentially correlated Gaussian noise."

    sigma: float  # rad/s
    tau_c: float  # s

    def __post_init__(self):
        if self.sigma < 0:
            raise NoiseModelError(f"Standard deviation must be non-negative; got {self.sigma}.")
        if not self.tau_c > 0:
            raise NoiseModelError(f"Correlation time must be positive; got {self.tau_c}.")

    @property
    def variance(self):
        return self.sigma**2

    @property
    def correlation_times(self):
        return (self.tau_c,)

    def autocorrelation(self, lag) -> Rvec:
        "sigma^2 exp(-|lag|/tau_c)"
        return self.sigma**2 * np.exp(-np.abs(np.asarray(lag, dtype=float)) / self.tau_c)

    def sample(self, times, count, rng):
        """
        Exact discrete update, from a stationary initial draw:

        ``x[i+1] = a x[i] + sigma sqrt(1 - a^2) xi[i]``, with ``a = exp(-dt/tau_c)``.
        """
        n = len(times)
        xi = rng.standard_normal((count, n))
        if n == 1:
            return self.sigma * xi
        dt = times[1] - times[0]
        a = np.exp(-dt / self.tau_c)
        innovations = self.sigma * np.sqrt(1.0 - a * a) * xi
        innovations[:, 0] = self.sigma * xi[:, 0]
        return lfilter([1.0], [1.0, -a], innovations, axis=1)

    def density(self, nu):
        nu = np.asarray(nu, dtype=float)
        return 2.0 * self.sigma**2 * self.tau_c / (1.0 + (TWOPI * nu * self.tau_c) ** 2)


@dataclass(frozen=True)
class PiecewiseConstant(SignalModel):
    """
    Arbitrary deterministic step signal: ``values[k]`` on ``[times[k], times[k+1])``.

    The last value holds indefinitely. It has no meaningful power spectrum.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.times or len(self.times) != len(self.values):
            raise NoiseModelError("Need one value per breakpoint time, and at least one of each.")
        if self.times[0] != 0.0 or np.any(np.diff(self.times) <= 0):
            raise NoiseModelError("Breakpoint times must start at zero and increase.")

    @property
    def is_deterministic(self):
        return True

    def _antiderivative(self, t):
        edges = np.asarray(self.times + (np.inf,))
        vals = np.asarray(self.values)
        spans = np.clip(t - edges[:-1], 0.0, np.diff(edges))
        return float(np.sum(vals * spans))

    def integral(self, a, b):
        return self._antiderivative(b) - self._antiderivative(a)

    def value(self, t):
        ix = max(int(np.searchsorted(self.times, t, side="right")) - 1, 0)
        return self.values[ix]

    def sample(self, times, count, rng):
        vals = np.array([self.value(t) for t in times])
        return np.repeat(vals[None, :], count, axis=0)

    def density(self, nu):
        raise UndefinedSpectrumError("A piecewise-constant test signal has no analytic power spectral density.")

    def lines(self):
        raise UndefinedSpectrumError("A piecewise-constant test signal has no analytic power spectral density.")


@dataclass(frozen=True)
class Composite(SignalModel):
    "Sum of component models."

    models: tuple[SignalModel, ...]

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if not self.models:
            raise NoiseModelError("A composite model needs at least one component.")

    @property
    def is_deterministic(self):
        return all(m.is_deterministic for m in self.models)

    @property
    def variance(self):
        return sum(m.variance for m in self.models)

    @property
    def correlation_times(self):
        return tuple(tc for m in self.models for tc in m.correlation_times)

    def sample(self, times, count, rng):
        return sum(m.sample(times, count, rng) for m in self.models)

    def realize(self, count, rng, T, dt):
        if self.is_deterministic:
            return DeterministicRealization(self, count)
        return SumRealization([m.realize(count, rng, T, dt) for m in self.models])

    def integral(self, a, b):
        return sum(m.integral(a, b) for m in self.models)

    def value(self, t):
        return sum(m.value(t) for m in self.models)

    def density(self, nu):
        return sum(m.density(nu) for m in self.models)

    def lines(self):
        return tuple(line for m in self.models for line in m.lines())

    def deterministic_part(self):
        parts = [p for p in (m.deterministic_part() for m in self.models) if p is not None]
        if not parts:
            return None
        return parts[0] if len(parts) == 1 else Composite(tuple(parts))


def with_offset(model: Optional[SignalModel], detuning: float) -> SignalModel:
    "Add a fixed detuning to a model (or to silence, for ``None``)."
    if model is None:
        return Constant(detuning)
    return Composite((model, Constant(detuning)))


#####
# Operations
#####


def sample_times(T: float, dt: float) -> Rvec:
    "Uniform sample times, starting at zero and reaching at least ``T``."
    n = max(int(np.ceil(T / dt - 1e-9)), 1)
    return dt * np.arange(n + 1)


def check_step(model: SignalModel, T: float, dt: float) -> None:
    """
    Validate a sampling step against the model and span.

    Raises:
        NoiseModelError: ``dt`` is non-positive, longer than ``T``, or too coarse for a correlation time.
    """
    if not 0 < dt <= T:
        raise NoiseModelError(f"Need 0 < dt <= T; got dt = {dt}, T = {T}.")
    for tau_c in model.correlation_times:
        if dt > OU_MAX_STEP * tau_c * (1 + 1e-12):
            raise NoiseModelError(f"Sample step {dt} s is too coarse for correlation time {tau_c} s (limit tau_c/10).")


def sample_trajectory(model: SignalModel, T: float, dt: float, seed: int, count: int = 1) -> NoiseTrajectory:
    """
    Sample detuning trajectories on a uniform grid covering [0, T].

    Args:
        model: Signal model.
        T: Span (s).
        dt: Sample step (s); ``0 < dt <= T`` and, for OU components, ``dt <= tau_c/10``.
        seed: Generator seed; identical arguments give bit-identical trajectories.

    Keyword Args:
        count: Number of trajectories (Default = 1, giving a 1-D trajectory).

    Returns:
        The sampled trajectory (or batch of them).
    """
    check_step(model, T, dt)
    rng = np.random.default_rng(seed)
    times = sample_times(T, dt)
    values = model.sample(times, count, rng)
    return NoiseTrajectory(times, values[0] if count == 1 else values, seed)


def psd(model: SignalModel, nu) -> PowerSpectrum:
    """
    Analytic power spectral density.

    Args:
        model: Signal model.
        nu: Frequencies (Hz), >= 0.

    Returns:
        Continuous density at ``nu`` plus the model's line components.

    Raises:
        UndefinedSpectrumError: The model has no analytic spectrum.
    """
    freqs = np.atleast_1d(np.asarray(nu, dtype=float))
    if np.any(freqs < 0):
        raise NoiseModelError("Spectral densities are tabulated for non-negative frequencies only.")
    return PowerSpectrum(freqs, np.asarray(model.density(freqs), dtype=float), model.lines())


def periodogram(trajectories: Union[NoiseTrajectory, Sequence[NoiseTrajectory]]) -> PowerSpectrum:
    """
    Averaged periodogram, normalized like ``psd()``.

    For each trajectory ``x`` of ``n`` samples at step ``dt``,
    ``X = rfft(x) dt`` and the estimate is ``mean(|X|^2) / (n dt)``, at ``nu_j = j / (n dt)``.
    The mean is not removed.

    Raises:
        NoiseModelError: Fewer than ``MIN_PERIODOGRAM_TRAJECTORIES`` trajectories,
            or inconsistent lengths/steps.
    """
    if isinstance(trajectories, NoiseTrajectory):
        batch, dt = trajectories.batch, trajectories.dt
    else:
        trajs = list(trajectories)
        if not trajs:
            raise NoiseModelError("No trajectories given.")
        lengths = {len(t.times) for t in trajs}
        steps = {round(t.dt / trajs[0].dt, 9) for t in trajs}
        if len(lengths) > 1 or len(steps) > 1:
            raise NoiseModelError(f"Inconsistent trajectory lengths {sorted(lengths)} or sample steps.")
        batch, dt = np.vstack([t.batch for t in trajs]), trajs[0].dt
    if batch.shape[0] < MIN_PERIODOGRAM_TRAJECTORIES:
        raise NoiseModelError(
            f"Need at least {MIN_PERIODOGRAM_TRAJECTORIES} trajectories for a periodogram; got {batch.shape[0]}."
        )
    n = batch.shape[1]
    spectra = np.abs(rfft(batch, axis=1) * dt) ** 2
    return PowerSpectrum(rfftfreq(n, dt), np.mean(spectra, axis=0) / (n * dt))
