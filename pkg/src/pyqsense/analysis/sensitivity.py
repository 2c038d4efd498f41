"""Sensitivity figures of merit.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Standard quantum limits, for ``N`` independent sensors:

    - DC (Ramsey): ``eta = 1 / (gamma sqrt(N T2*))``
    - AC (echo / decoupling): ``eta = 1 / (gamma sqrt(N T2))``

Imperfect readout multiplies either figure by ``sqrt(M0) / c``; that
penalty is always reported alongside, never folded into, the ideal figure.
"""

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from pyqsense.common import TWOPI, Rvec
from pyqsense.engine.readout import ReadoutConfig

# Gyromagnetic ratio of the NV center electron spin, gamma / 2 pi = 30 MHz/mT.
GAMMA_NV = TWOPI * 3.0e10  # rad/s/T

# NV center zero field splitting, 2.87 GHz.
OMEGA0_NV = TWOPI * 2.87e9  # rad/s


class SensorSpecError(ValueError):
    """Base Exception for all sensor specification Errors."""


@dataclass(frozen=True)
class SensorSpec:
    "Physical constants of a sensor."

    t2_star: float  # s
    t2: float  # s
    t1: float  # s
    n_sensors: float = 1
    gamma: float = GAMMA_NV  # rad/s/T
    omega0: float = OMEGA0_NV  # rad/s

    def __post_init__(self):
        for name in ("t2_star", "t2", "t1", "n_sensors", "gamma", "omega0"):
            if not getattr(self, name) > 0:
                raise SensorSpecError(f"'{name}' must be positive; got {getattr(self, name)}.")
        if not self.t2_star <= self.t2 <= self.t1:
            raise SensorSpecError(f"Need T2* <= T2 <= T1; got {self.t2_star}, {self.t2}, {self.t1} s.")

    @property
    def sigma_delta(self) -> float:
        "Static detuning spread implied by T2*, 1/T2* (rad/s)."
        return 1.0 / self.t2_star

    def as_dict(self) -> dict:
        "Plain dictionary form."
        return asdict(self)


@dataclass(frozen=True)
class SensitivityReport:
    """
    Sensitivity, and the precision it buys after averaging for ``t_total``.

    ``eta`` includes the readout penalty; ``eta_ideal`` doesn't.
    """

    kind: str  # "dc" or "ac"
    eta_ideal: float  # T/sqrt(Hz)
    eta: float  # T/sqrt(Hz)
    tau: float  # interrogation time (s)
    t_total: float  # averaging time (s)
    sigma_b: float  # T
    sigma_delta: float  # rad/s
    sigma_p: float
    contrast: float
    m0: float
    notes: tuple[str, ...] = field(default=())

    @property
    def penalty(self) -> float:
        "eta / eta_ideal, sqrt(M0)/c."
        return self.eta / self.eta_ideal

    def as_dict(self) -> dict:
        "Plain dictionary form."
        return asdict(self)


def _report(kind: str, eta_ideal: float, tau: float, spec: SensorSpec, readout: ReadoutConfig, t_total: float):
    if not t_total > 0:
        raise SensorSpecError(f"Averaging time must be positive; got {t_total}.")
    eta = eta_ideal * readout.penalty
    sigma_b = eta / np.sqrt(t_total)
    sigma_delta = spec.gamma * sigma_b
    notes = ()
    if readout.penalty != 1.0:
        notes = (f"Includes a readout penalty sqrt(M0)/c = {readout.penalty:.6g} beyond the standard quantum limit.",)
    return SensitivityReport(
        kind,
        float(eta_ideal),
        float(eta),
        tau,
        t_total,
        float(sigma_b),
        float(sigma_delta),
        float(0.5 * tau * sigma_delta),
        readout.contrast,
        readout.m0,
        notes,
    )


def sensitivity_dc(spec: SensorSpec, readout: Optional[ReadoutConfig] = None, t_total: float = 1.0) -> SensitivityReport:
    """
    Ramsey (static field) sensitivity at the standard quantum limit.

    Args:
        spec: Sensor constants.

    Keyword Args:
        readout: Readout statistics; only ``m0`` and ``contrast`` matter (Default = ideal).
        t_total: Averaging time for the reported precisions (s) (Default = 1).
    """
    readout = readout or ReadoutConfig()
    eta = 1.0 / (spec.gamma * np.sqrt(spec.n_sensors * spec.t2_star))
    return _report("dc", eta, spec.t2_star, spec, readout, t_total)


def sensitivity_ac(spec: SensorSpec, readout: Optional[ReadoutConfig] = None, t_total: float = 1.0) -> SensitivityReport:
    "Echo / decoupling (AC field) sensitivity; as ``sensitivity_dc()``, with T2 in place of T2*."
    readout = readout or ReadoutConfig()
    eta = 1.0 / (spec.gamma * np.sqrt(spec.n_sensors * spec.t2))
    return _report("ac", eta, spec.t2, spec, readout, t_total)


def eta_vs_tau(spec: SensorSpec, tau, readout: Optional[ReadoutConfig] = None, envelope: bool = True):
    """
    Ramsey sensitivity as a function of interrogation time.

    ``eta(tau) = exp(tau^2 / (2 T2*^2)) / (gamma sqrt(N tau))``, times any readout penalty.

    Keyword Args:
        envelope: Include the decoherence envelope (Default = True);
            ``False`` gives the decoherence-free ``1/(gamma sqrt(N tau))``.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise SensorSpecError("Interrogation times must be positive.")
    penalty = readout.penalty if readout is not None else 1.0
    res = penalty / (spec.gamma * np.sqrt(spec.n_sensors * tau))
    if envelope:
        res = res * np.exp(0.5 * (tau / spec.t2_star) ** 2)
    return float(res) if res.ndim == 0 else res


@dataclass(frozen=True)
class OptimalTau:
    "Minimizer of the Ramsey sensitivity."

    tau: float  # s
    eta: float  # in units of 1/(gamma sqrt(N)), sqrt(s)


def optimal_tau(sigma_delta: float) -> OptimalTau:
    """
    Interrogation time minimizing ``exp(sigma^2 tau^2 / 2) / sqrt(tau)``.

    Minimizes ``u^2/2 - ln(u)/2`` over ``u = sigma tau`` numerically;
    the stationary point is ``u = 1/sqrt(2)``, i.e. ``tau* = T2*/sqrt(2)``.

    Args:
        sigma_delta: Static detuning spread (rad/s), > 0.

    Returns:
        tau* and the (unit gamma, N) sensitivity there.
    """
    if not sigma_delta > 0:
        raise SensorSpecError(f"Detuning spread must be positive; got {sigma_delta}.")
    res = minimize_scalar(
        lambda u: 0.5 * u * u - 0.5 * np.log(u), bounds=(1e-6, 10.0), method="bounded", options={"xatol": 1e-12}
    )
    tau = float(res.x) / sigma_delta
    return OptimalTau(tau, float(np.exp(0.5 * (sigma_delta * tau) ** 2) / np.sqrt(tau)))


@dataclass(frozen=True)
class EntanglementComparison:
    "N sensors: independent, naively entangled, and entangled with its shortened T2*."

    independent: float
    naive_entangled: float
    corrected_entangled: float


def entanglement_comparison(n_sensors: int, gamma: float, t2_star: float) -> EntanglementComparison:
    """
    Compare independent and entangled ensembles.

    An N-spin entangled state accrues phase N times faster (``1/(gamma N sqrt(T2*))``),
    but dephases N times faster too, which restores the independent figure exactly.
    """
    if n_sensors < 1:
        raise SensorSpecError(f"Need at least one sensor; got {n_sensors}.")
    return EntanglementComparison(
        1.0 / (gamma * np.sqrt(n_sensors * t2_star)),
        1.0 / (gamma * n_sensors * np.sqrt(t2_star)),
        1.0 / (gamma * n_sensors * np.sqrt(t2_star / n_sensors)),
    )


@dataclass(frozen=True)
class SensorPreset:
    "A representative sensor, with its measured sensitivities (T/sqrt(Hz))."

    spec: SensorSpec
    measured_eta_dc: float
    measured_eta_ac: float
    description: str = ""


SENSOR_PRESETS = {
    "single_nv": SensorPreset(SensorSpec(1e-6, 300e-6, 6e-3), 1e-6, 20e-9, "Single NV center, natural abundance 13C"),
    "single_nv_12c": SensorPreset(SensorSpec(228e-6, 2e-3, 6e-3), 20e-9, 4e-9, "Single NV center, 12C enriched diamond"),
    "nv_ensemble": SensorPreset(SensorSpec(30e-6, 50e-6, 6e-3, n_sensors=1e11), 1e-12, 1e-12, "NV ensemble"),
}


def implied_readout_penalty(name: str) -> tuple[float, float]:
    """
    (DC, AC) ratios of a preset's measured sensitivity to its standard quantum limit.

    This is the ``sqrt(M0)/c`` a real readout would need to explain the measurement.
    """
    try:
        preset = SENSOR_PRESETS[name]
    except KeyError as err:
        raise SensorSpecError(f"Unknown sensor preset '{name}'; expected one of {list(SENSOR_PRESETS)}.") from err
    return (
        preset.measured_eta_dc / sensitivity_dc(preset.spec).eta_ideal,
        preset.measured_eta_ac / sensitivity_ac(preset.spec).eta_ideal,
    )


def field_precision(eta: float, t_total) -> Rvec:
    "sigma_B after averaging for ``t_total``, eta / sqrt(T)."
    return eta / np.sqrt(np.asarray(t_total, dtype=float))
