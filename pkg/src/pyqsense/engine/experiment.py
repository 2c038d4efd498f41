"""Sequence execution, Monte-Carlo averaging, sweeps, and detuning estimation.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Seeding:

    Every random draw comes from ``task_rng(root_seed, point, stream)``:
    stream 0 of a sweep point feeds its readout, and stream ``1 + j`` feeds
    its ``j``-th chunk of noise realizations. Chunks are summed in chunk order,
    so results don't depend on how many workers ran them.
"""

import json
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from scipy.optimize import curve_fit

from pyqsense.analysis.spectral import predict_coherence
from pyqsense.common import PI, Rvec, table_csv, table_json, task_rng, write_atomic
from pyqsense.config import SWEEP_UNITS, SweepSpec
from pyqsense.engine.readout import ReadoutConfig, simulate_readout
from pyqsense.noise.config import format_noise_config
from pyqsense.noise.model import (
    Constant,
    DeterministicRealization,
    NoiseTrajectory,
    Realization,
    SignalCoverageError,
    SignalModel,
    with_offset,
)
from pyqsense.qubit.propagator import (
    free_evolve,
    population_one,
    rabi_oscillation,
    rabi_propagator,
    rotate,
    rotation_propagator,
)
from pyqsense.qubit.state import DensityMatrix
from pyqsense.sequence.model import Delay, PulseSequence, SequenceError, SequenceFamily
from pyqsense.sequence.parser import format_sequence

DEFAULT_REALIZATIONS = 1000
CHUNK_SIZE = 250

# Sample step for sampled noise: min(tau_c / OU_STEPS_PER_TAU_C, T / MIN_STEPS).
OU_STEPS_PER_TAU_C = 20
MIN_STEPS = 1000

# Linear range of the slope-point estimator, |Delta - Delta0| tau.
LINEAR_RANGE = 0.5

SequenceSource = Union[PulseSequence, SequenceFamily]
Signal = Union[float, SignalModel, Realization]

# Root seed -> configuration fingerprint, for this process.
_seed_registry: dict[int, str] = {}


class ExperimentError(ValueError):
    """Base Exception for all experiment Errors."""


#####
# Single shots
#####


def _as_signal(realization: Signal) -> Union[SignalModel, Realization]:
    if isinstance(realization, (int, float)):
        return Constant(float(realization))
    if isinstance(realization, SignalModel):
        if not realization.is_deterministic:
            raise ExperimentError(f"{type(realization).__name__} is random; realize it before running a shot.")
        return realization
    if isinstance(realization, Realization):
        if realization.count != 1:
            raise ExperimentError(f"One realization expected; got a batch of {realization.count}.")
        return realization
    raise ExperimentError(f"Not a signal: {realization!r}")


def _scalar(x) -> float:
    return float(np.asarray(x, dtype=float).reshape(-1)[0])


def _mean(signal, a: float, b: float):
    "Mean detuning over [a, b]; the point value when the window is empty."
    if b > a:
        return signal.integral(a, b) / (b - a)
    return signal.value(a)


def run_once(seq: PulseSequence, realization: Signal) -> float:
    """
    Run one shot of a sequence, on density matrices.

    Ideal pulses are instantaneous rotations; finite pulses are Rabi evolutions
    under the mean detuning over their span (clipped to [0, T]). Each delay
    advances the phase by the exact integral of the detuning across it.

    Args:
        seq: The sequence; it starts in |0>.
        realization: A constant detuning (rad/s), a deterministic ``SignalModel``,
            or a single realization (e.g. a sampled ``NoiseTrajectory``).

    Returns:
        The final |1> population.

    Raises:
        ExperimentError: The realization doesn't cover [0, T], or is a random model/batch.
    """
    signal = _as_signal(realization)
    T = seq.total_time
    if isinstance(signal, NoiseTrajectory) and not signal.covers(0.0, T):
        raise ExperimentError(f"Trajectory spans [{signal.times[0]}, {signal.times[-1]}] s; the sequence needs [0, {T}] s.")
    state = DensityMatrix.ground()
    try:
        for placed in seq.timeline():
            event = placed.event
            if isinstance(event, Delay):
                phase = _scalar(signal.integral(placed.start, placed.stop))
                state = free_evolve(state, phase / event.duration, event.duration)
            elif event.is_ideal:
                state = rotate(state, event.axis, event.angle)
            else:
                a, b = np.clip([placed.start, placed.stop], 0.0, T)
                delta = _scalar(_mean(signal, a, b))
                state = rabi_oscillation(state, event.rabi_freq, delta, event.duration, axis=event.drive_axis)
    except SignalCoverageError as err:
        raise ExperimentError(str(err)) from err
    return population_one(state)


def populations(seq: PulseSequence, realization: Realization) -> Rvec:
    """
    Final |1> populations for a batch of realizations.

    The same physics as ``run_once()``, propagating state vectors for the whole batch at once.
    """
    T = seq.total_time
    count = realization.count
    psi = np.zeros((count, 2), dtype=complex)
    psi[:, 0] = 1.0
    for placed in seq.timeline():
        event = placed.event
        if isinstance(event, Delay):
            phase = np.broadcast_to(realization.integral(placed.start, placed.stop), (count,))
            psi = psi * np.exp(0.5j * np.outer(phase, [-1.0, 1.0]))
        elif event.is_ideal:
            psi = psi @ rotation_propagator(event.axis, event.angle).T
        else:
            a, b = np.clip([placed.start, placed.stop], 0.0, T)
            delta = np.broadcast_to(realization.mean(a, b), (count,))
            u = rabi_propagator(event.rabi_freq, delta, event.duration, axis=event.drive_axis)
            psi = np.einsum("kij,kj->ki", u, psi)
    return np.abs(psi[:, 1]) ** 2


#####
# Monte-Carlo averaging
#####


def sample_step(model: Optional[SignalModel], T: float) -> float:
    "Trajectory step for sampled noise: min(tau_c/20, T/1000)."
    dt = T / MIN_STEPS
    taus = model.correlation_times if model is not None else ()
    if taus:
        dt = min(dt, min(taus) / OU_STEPS_PER_TAU_C)
    return dt


def chunk_sizes(realizations: int, chunk: int = CHUNK_SIZE) -> list[int]:
    "Split a realization count into fixed chunks."
    full, rest = divmod(realizations, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _chunk_sum(task) -> float:
    "Sum of populations over one chunk of realizations. (Runs in worker processes.)"
    seq, model, seed, point, chunk, count = task
    T = seq.total_time
    rng = task_rng(seed, point, 1 + chunk)
    realization = model.realize(count, rng, T, sample_step(model, T))
    return float(np.sum(populations(seq, realization)))


def mean_populations(
    points: list[tuple[PulseSequence, Optional[SignalModel]]],
    realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    workers: int = 1,
) -> Rvec:
    """
    Noise-averaged |1> population at each (sequence, model) point.

    Deterministic points are run once; random points average ``realizations``
    draws, split into chunks seeded from ``(seed, point, 1 + chunk)``.

    Keyword Args:
        workers: Processes to spread chunks over (Default = 1, in process).
    """
    if realizations < 1:
        raise ExperimentError(f"Need at least one noise realization; got {realizations}.")
    res = np.zeros(len(points))
    tasks = []
    owners = []
    for i, (seq, model) in enumerate(points):
        model = model if model is not None else Constant(0.0)
        if model.is_deterministic:
            res[i] = populations(seq, DeterministicRealization(model, 1))[0]
            continue
        for j, count in enumerate(chunk_sizes(realizations)):
            tasks.append((seq, model, seed, i, j, count))
            owners.append(i)
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=workers) as pool:
            sums = pool.map(_chunk_sum, tasks)
    else:
        sums = [_chunk_sum(task) for task in tasks]
    owner_ix = np.array(owners, dtype=int)
    chunk_sums = np.array(sums)
    for i in sorted(set(owners)):
        res[i] = np.sum(chunk_sums[owner_ix == i]) / realizations
    return res


#####
# Sweeps
#####


def describe_source(source: SequenceSource) -> dict[str, Any]:
    "JSON-ready description of a sequence source."
    if isinstance(source, SequenceFamily):
        return {"builder": source.builder, "params": dict(source.params)}
    return {"name": source.name, "text": format_sequence(source)}


def sweep_points(
    source: SequenceSource, sweep: SweepSpec, model: Optional[SignalModel]
) -> list[tuple[PulseSequence, Optional[SignalModel]]]:
    """
    The (sequence, model) pair at each sweep point.

    Raises:
        ExperimentError: The sweep variable doesn't apply to the source.
    """
    try:
        if sweep.variable == "detuning":
            seq = source if isinstance(source, PulseSequence) else source.build()
            return [(seq, with_offset(model, v)) for v in sweep.values]
        if sweep.variable == "freq":
            raise ExperimentError("Drive frequency sweeps belong to ODMR scans.")
        if isinstance(source, PulseSequence):
            raise ExperimentError(f"Sweeping '{sweep.variable}' needs a sequence builder, not a fixed sequence.")
        if not source.accepts(sweep.variable):
            raise ExperimentError(f"Builder '{source.builder}' can't be swept over '{sweep.variable}'.")
        return [(source.build(**{sweep.variable: int(v) if sweep.variable == "n" else v}), model) for v in sweep.values]
    except SequenceError as err:
        raise ExperimentError(str(err)) from err


def _check_seed(seed: int, fingerprint: str) -> Optional[str]:
    prior = _seed_registry.setdefault(seed, fingerprint)
    if prior != fingerprint:
        return f"Root seed {seed} was already used with a different configuration; their random streams coincide."
    return None


def _phase_notes(points) -> list[str]:
    notes = []
    for seq, _ in points:
        if not seq.is_phase_matched():
            notes.append(f"Sequence '{seq.name}' doesn't send zero phase to |1>; fringes are not referenced to p = 1.")
            break
    return notes


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    "Per-point true and estimated populations for a sweep."

    variable: str
    values: Rvec
    p_true: Rvec
    p_hat: Rvec
    stderr: Rvec
    metadata: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def column(self) -> str:
        "Header for the sweep column."
        unit = SWEEP_UNITS.get(self.variable, "")
        return f"{self.variable}_{unit}" if unit else self.variable

    def table(self) -> tuple[list[str], np.ndarray]:
        "(headers, rows)"
        return (
            [self.column, "p_true", "p_hat", "stderr"],
            np.column_stack([self.values, self.p_true, self.p_hat, self.stderr]),
        )

    def to_csv(self) -> str:
        "CSV text, one row per sweep point."
        return table_csv(*self.table())

    def to_json(self, config: Optional[dict] = None) -> str:
        "JSON document holding the configuration, metadata, notes and columns."
        return table_json(*self.table(), config=config, metadata=self.metadata, notes=self.notes)

    def write_csv(self, path: Union[str, Path]) -> Path:
        "Export to CSV."
        return write_atomic(path, self.to_csv())

    def write_json(self, path: Union[str, Path], config: Optional[dict] = None) -> Path:
        "Export to JSON."
        return write_atomic(path, self.to_json(config))


def run_experiment(
    source: SequenceSource,
    model: Optional[SignalModel],
    sweep: SweepSpec,
    readout: ReadoutConfig,
    realizations: int = DEFAULT_REALIZATIONS,
    workers: int = 1,
) -> ExperimentResult:
    """
    Sweep a sequence against a signal model, with projection-noise readout.

    Args:
        source: A fixed sequence (detuning sweeps only), or a sequence family.
        model: Detuning process; ``None`` for none.
        sweep: Swept variable: ``tau``, ``T``, ``n`` or ``detuning``.
            A detuning sweep adds each value to the model as a fixed offset.
        readout: Measurement statistics and root seed.

    Keyword Args:
        realizations: Noise realizations averaged per point (Default = 1000).
        workers: Processes for the Monte-Carlo chunks (Default = 1).

    Returns:
        The sweep result; a pure function of the inputs and ``readout.seed``.

    Raises:
        ExperimentError: Empty or inapplicable sweep.
    """
    if sweep is None or not len(sweep):
        raise ExperimentError("Empty sweep.")
    points = sweep_points(source, sweep, model)
    p_true = mean_populations(points, realizations, readout.seed, workers)
    p_hat = np.zeros(len(points))
    stderr = np.zeros(len(points))
    for i, p in enumerate(p_true):
        est, err = simulate_readout(p, readout, task_rng(readout.seed, i, 0))
        p_hat[i], stderr[i] = float(est), float(err)
    metadata = {
        "sequence": describe_source(source),
        "model": format_noise_config(model),
        "readout": readout.as_dict(),
        "sweep": sweep.text or f"{sweep.variable}={','.join(repr(v) for v in sweep.values)}",
        "realizations": realizations,
        "seed": readout.seed,
    }
    fingerprint = json.dumps({k: v for k, v in metadata.items() if k != "seed"}, sort_keys=True)
    notes = _phase_notes(points)
    seed_note = _check_seed(readout.seed, fingerprint)
    if seed_note:
        notes.append(seed_note)
    return ExperimentResult(sweep.variable, np.array(sweep.values), p_true, p_hat, stderr, metadata, tuple(notes))


#####
# Detuning estimation
#####


def operating_offset(tau: float) -> float:
    "Slope operating point, Delta0 = pi / (2 tau)."
    if not tau > 0:
        raise ExperimentError(f"Interrogation time must be positive; got {tau}.")
    return PI / (2.0 * tau)


@dataclass(frozen=True)
class DetuningEstimate:
    "Slope-point detuning estimate."

    detuning: float  # rad/s
    sigma: float  # rad/s; NaN when no population error was given
    offset: float  # Delta0, rad/s
    tau: float  # s
    notes: tuple[str, ...] = ()

    def field(self, gamma: float) -> tuple[float, float]:
        "(B, sigma_B) in tesla: the detuning beyond the operating offset, over ``gamma`` (rad/s/T)."
        return (self.detuning - self.offset) / gamma, self.sigma / gamma


def estimate_detuning(
    p_hat: float,
    tau: float,
    offset: Optional[float] = None,
    sigma_p: Optional[float] = None,
    envelope: float = 1.0,
) -> DetuningEstimate:
    """
    Linearized Ramsey slope estimator.

    Around the operating point, ``p = 1/2 (1 - envelope sin((Delta - Delta0) tau))``, so
    ``Delta = Delta0 - 2 (p - 1/2) / (tau envelope)`` to first order.

    Args:
        p_hat: Estimated |1> population.
        tau: Interrogation time (s).

    Keyword Args:
        offset: Operating detuning Delta0 (rad/s) (Default = pi/(2 tau)).
        sigma_p: Standard error of ``p_hat``; a population alone carries no shot count,
            so without it ``sigma`` (and the field uncertainty) is NaN (Default = None).
        envelope: Fringe contrast at ``tau``, in (0, 1] (Default = 1).

    Returns:
        The estimate, noting any departure from the linear range ``|Delta - Delta0| tau < 0.5``.

    Raises:
        ExperimentError: Bad ``tau``, ``p_hat`` or ``envelope``.
    """
    delta0 = operating_offset(tau) if offset is None else float(offset)
    if not 0.0 <= p_hat <= 1.0:
        raise ExperimentError(f"Population estimate must lie in [0, 1]; got {p_hat}.")
    if not 0 < envelope <= 1:
        raise ExperimentError(f"Fringe envelope must lie in (0, 1]; got {envelope}.")
    if not tau > 0:
        raise ExperimentError(f"Interrogation time must be positive; got {tau}.")
    slope = 2.0 / (tau * envelope)
    detuning = delta0 - slope * (p_hat - 0.5)
    sigma = slope * sigma_p if sigma_p is not None else float("nan")
    notes = ()
    if abs(detuning - delta0) * tau >= LINEAR_RANGE:
        notes = (f"|Delta - Delta0| tau = {abs(detuning - delta0) * tau:.3g} is outside the linear range (< 0.5).",)
    return DetuningEstimate(float(detuning), float(sigma), delta0, float(tau), notes)


#####
# Coherence decay
#####


@dataclass(frozen=True, eq=False)
class DecayCurve:
    "Coherence C = 2 <p> - 1 along a sequence family's parameter grid."

    variable: str
    values: Rvec
    total_times: Rvec  # s
    coherence: Rvec
    label: str
    realizations: int = DEFAULT_REALIZATIONS
    notes: tuple[str, ...] = ()

    def fit_decay_time(self) -> float:
        """
        1/e decay time, in total free evolution time.

        Fits a stretched exponential ``exp(-(T/T_c)^q)``, starting from the
        interpolated 1/e crossing. Returns ``inf`` if the curve never falls to 1/e.
        """
        t, c = np.asarray(self.total_times), np.asarray(self.coherence)
        below = np.nonzero(c <= np.exp(-1.0))[0]
        if not len(below):
            return float("inf")
        k = below[0]
        guess = float(t[k])
        if k > 0:
            l0, l1 = np.log(np.clip(c[[k - 1, k]], 1e-300, None))
            if l1 < l0:
                guess = float(t[k - 1] + (-1.0 - l0) * (t[k] - t[k - 1]) / (l1 - l0))
        try:
            popt, _ = curve_fit(
                lambda x, t_c, q: np.exp(-((x / t_c) ** q)),
                t,
                c,
                p0=(guess, 2.0),
                bounds=([guess / 10.0, 0.5], [guess * 10.0, 4.0]),
            )
            return float(popt[0])
        except (RuntimeError, ValueError):
            return guess

    def table(self) -> tuple[list[str], np.ndarray]:
        "(headers, rows)"
        unit = SWEEP_UNITS.get(self.variable, "")
        column = f"{self.variable}_{unit}" if unit else self.variable
        return [column, "T_s", f"C_{self.label}"], np.column_stack([self.values, self.total_times, self.coherence])

    def to_csv(self) -> str:
        "CSV text."
        return table_csv(*self.table())


def coherence_decay_curve(
    family: SequenceFamily,
    grid,
    model: Optional[SignalModel],
    variable: str = "tau",
    realizations: int = DEFAULT_REALIZATIONS,
    seed: int = 0,
    workers: int = 1,
    analytic: bool = False,
) -> DecayCurve:
    """
    Coherence decay along a parameter grid.

    Args:
        family: Sequence builder and its fixed parameters.
        grid: Ascending values of ``variable``.
        model: Detuning process.

    Keyword Args:
        variable: Swept parameter: ``tau``, ``T`` or ``n`` (Default = "tau").
        realizations: Noise realizations per point (Default = 1000).
        seed: Root seed (Default = 0).
        workers: Processes for the Monte-Carlo chunks (Default = 1).
        analytic: Use the filter-function prediction instead of Monte-Carlo (Default = False).

    Raises:
        ExperimentError: Grid not strictly ascending, or inapplicable variable.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or not len(grid):
        raise ExperimentError("Empty decay grid.")
    if np.any(np.diff(grid) <= 0):
        raise ExperimentError("Decay grid must be strictly ascending.")
    points = sweep_points(family, SweepSpec(variable, tuple(grid)), model)
    if analytic:
        coherence = np.array([predict_coherence(seq, mdl) for seq, mdl in points])
    else:
        coherence = 2.0 * mean_populations(points, realizations, seed, workers) - 1.0
    total = np.array([seq.total_time for seq, _ in points])
    return DecayCurve(variable, grid, total, coherence, family.label, realizations, tuple(_phase_notes(points)))
