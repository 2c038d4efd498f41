"""Rotating-frame propagators and the state operations built on them.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

All propagators are closed-form SU(2) matrices:

    - free evolution: ``exp(+i detuning t sigma_z / 2)``, which advances the
      equatorial phase by ``detuning * t``;
    - rotation: ``exp(-i angle sigma_axis / 2)``;
    - driven (Rabi) evolution under ``H = -(hbar/2) detuning sigma_z + (hbar/2) rabi sigma_axis``.

The propagator builders broadcast over array arguments, returning ``(..., 2, 2)`` stacks.
The lab frame term at twice the transition frequency is never simulated.
"""

import numpy as np

from pyqsense.common import Cvec
from pyqsense.qubit.state import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    BlochVector,
    DensityMatrix,
    QubitState,
    as_density,
)

_PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

AXES = ("x", "y", "z", "-x", "-y", "-z")


def pauli(axis: str) -> Cvec:
    """
    Pauli matrix for a (possibly negated) axis name.

    Args:
        axis: One of ``AXES``.

    Raises:
        ValueError: Unknown axis.
    """
    name = axis.strip().lower()
    sign = 1.0
    if name.startswith("-"):
        sign, name = -1.0, name[1:]
    elif name.startswith("+"):
        name = name[1:]
    if name not in _PAULI:
        raise ValueError(f"Unknown rotation axis: '{axis}'; expected one of {AXES}.")
    return sign * _PAULI[name]


def rotation_propagator(axis: str, angle) -> Cvec:
    "exp(-i angle sigma_axis / 2)"
    half = 0.5 * np.asarray(angle, dtype=float)[..., None, None]
    return np.cos(half) * IDENTITY - 1j * np.sin(half) * pauli(axis)


def free_evolution_propagator(detuning, t) -> Cvec:
    "exp(+i detuning t sigma_z / 2) = diag(e^{-i detuning t/2}, e^{+i detuning t/2})"
    half = 0.5 * np.asarray(detuning, dtype=float) * np.asarray(t, dtype=float)
    u = np.zeros(half.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = np.exp(-1j * half)
    u[..., 1, 1] = np.exp(1j * half)
    return u


def rabi_propagator(rabi_freq, detuning, t, axis: str = "y") -> Cvec:
    """
    Propagator for resonant driving with an off-resonance detuning.

    ``U = cos(w t/2) I - i sin(w t/2) (rabi sigma_axis - detuning sigma_z)/w``,
    with ``w = sqrt(rabi^2 + detuning^2)``.

    Args:
        rabi_freq: Rabi frequency (rad/s), >= 0.
        detuning: Detuning (rad/s).
        t: Drive duration (s).

    Keyword Args:
        axis: Drive axis (Default = "y").
    """
    rabi, delta, dur = np.broadcast_arrays(
        np.asarray(rabi_freq, dtype=float), np.asarray(detuning, dtype=float), np.asarray(t, dtype=float)
    )
    omega = np.hypot(rabi, delta)
    safe = np.where(omega > 0, omega, 1.0)
    n_axis = np.where(omega > 0, rabi / safe, 0.0)[..., None, None]
    n_z = np.where(omega > 0, -delta / safe, 0.0)[..., None, None]
    generator = n_axis * pauli(axis) + n_z * SIGMA_Z
    half = (0.5 * omega * dur)[..., None, None]
    return np.cos(half) * IDENTITY - 1j * np.sin(half) * generator


def _conjugate(state: QubitState, u: Cvec) -> DensityMatrix:
    rho = as_density(state).matrix
    return DensityMatrix.from_matrix(u @ rho @ u.conj().T)


def free_evolve(state: QubitState, detuning: float, t: float) -> DensityMatrix:
    """
    Free precession under a constant detuning.

    Args:
        state: Input state.
        detuning: Detuning (rad/s).
        t: Evolution time (s), >= 0.

    Returns:
        The evolved state; populations are untouched and the phase advances by ``detuning * t``.
    """
    if t < 0:
        raise ValueError(f"Evolution time must be non-negative; got {t}.")
    return _conjugate(state, free_evolution_propagator(detuning, t))


def rotate(state: QubitState, axis: str, angle: float) -> DensityMatrix:
    """
    Instantaneous rotation about a Bloch sphere axis.

    With these conventions, a ``pi`` rotation about ``y`` takes |0> to |1>,
    and a ``pi/2`` rotation about ``y`` takes |0> to (|0> + |1>)/sqrt(2).
    """
    return _conjugate(state, rotation_propagator(axis, angle))


def rabi_oscillation(state: QubitState, rabi_freq: float, detuning: float, t: float, axis: str = "y") -> DensityMatrix:
    """
    Driven evolution, in the rotating wave approximation.

    At zero detuning, this is ``rotate(state, axis, rabi_freq * t)``
    and the |1> population of an initial |0> is ``sin^2(rabi_freq t / 2)``.
    """
    if rabi_freq < 0:
        raise ValueError(f"Rabi frequency must be non-negative; got {rabi_freq}.")
    return _conjugate(state, rabi_propagator(rabi_freq, detuning, t, axis=axis))


def population_one(state: QubitState) -> float:
    "Probability of finding the qubit in |1>."
    return as_density(state).rho11


def to_bloch(state: QubitState) -> BlochVector:
    "Bloch sphere coordinates of a state."
    rho = as_density(state)
    return BlochVector(2.0 * rho.rho10.real, 2.0 * rho.rho10.imag, rho.rho11 - rho.rho00)
