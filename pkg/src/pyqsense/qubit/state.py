"""Qubit state types: ``PureState``, ``DensityMatrix`` and ``BlochVector``.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Conventions:

    - Basis ordering is (|0>, |1>).
    - ``SIGMA_Z = diag(-1, +1)``, so that <sigma_z> is the Bloch ``z`` coordinate
      and |0> sits at the south pole (z = -1).
    - Bloch coordinates: x = 2 Re(rho_10), y = 2 Im(rho_10), z = rho_11 - rho_00;
      the equatorial longitude of (|0> + e^{i phi}|1>)/sqrt(2) is phi.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from pyqsense.common import ATOL, Cvec

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)

# Tolerance on the hermiticity of matrices handed to ``DensityMatrix.from_matrix()``.
HERMITIAN_TOL = 1e-9


class QubitStateError(ValueError):
    """Base Exception for all qubit state Errors."""


@dataclass(frozen=True)
class BlochVector:
    """Point in (or on) the Bloch sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.x**2 + self.y**2 + self.z**2 > 1.0 + ATOL:
            raise QubitStateError(f"Bloch vector ({self.x}, {self.y}, {self.z}) lies outside the unit sphere.")

    @property
    def norm(self) -> float:
        "Length of the vector; 1 for pure states."
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    @property
    def longitude(self) -> float:
        "Equatorial angle, atan2(y, x)."
        return float(np.arctan2(self.y, self.x))

    def as_array(self):
        "(x, y, z) as a NumPy vector."
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class PureState:
    """
    Pure qubit state amp0|0> + amp1|1>.

    Construction never renormalizes; use ``PureState.normalized()`` for that.
    """

    amp0: complex
    amp1: complex

    def __post_init__(self):
        object.__setattr__(self, "amp0", complex(self.amp0))
        object.__setattr__(self, "amp1", complex(self.amp1))
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1.0) > ATOL:
            raise QubitStateError(f"State norm {norm!r} differs from one; renormalize explicitly.")

    @classmethod
    def normalized(cls, amp0: complex, amp1: complex) -> "PureState":
        "Build a state from arbitrary (non-zero) amplitudes, dividing out their norm."
        norm = np.sqrt(abs(amp0) ** 2 + abs(amp1) ** 2)
        if norm == 0:
            raise QubitStateError("Cannot normalize the zero vector.")
        return cls(amp0 / norm, amp1 / norm)

    @classmethod
    def ground(cls) -> "PureState":
        "|0>"
        return cls(1.0, 0.0)

    @classmethod
    def excited(cls) -> "PureState":
        "|1>"
        return cls(0.0, 1.0)

    @classmethod
    def equator(cls, phase: float = 0.0) -> "PureState":
        "(|0> + e^{i phase}|1>)/sqrt(2)"
        return cls(np.sqrt(0.5), np.sqrt(0.5) * np.exp(1j * phase))

    @property
    def ket(self) -> Cvec:
        "Column of amplitudes, as a length 2 vector."
        return np.array([self.amp0, self.amp1], dtype=complex)

    @property
    def phase(self) -> float:
        "Relative phase arg(amp1) - arg(amp0)."
        return float(np.angle(self.amp1) - np.angle(self.amp0))

    def density(self) -> "DensityMatrix":
        "The projector |psi><psi|."
        return DensityMatrix.from_matrix(np.outer(self.ket, self.ket.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """
    Qubit density matrix.

    Only ``rho00``, ``rho11`` and ``rho01`` are stored; ``rho10`` is their
    conjugate partner, so hermiticity holds exactly.
    """

    rho00: float
    rho11: float
    rho01: complex

    def __post_init__(self):
        object.__setattr__(self, "rho00", float(self.rho00))
        object.__setattr__(self, "rho11", float(self.rho11))
        object.__setattr__(self, "rho01", complex(self.rho01))
        trace = self.rho00 + self.rho11
        if abs(trace - 1.0) > ATOL:
            raise QubitStateError(f"Density matrix trace {trace!r} differs from one.")
        if self.determinant < -ATOL:
            raise QubitStateError(f"Density matrix is not positive semidefinite (det = {self.determinant!r}).")
        purity = self.purity
        if not 0.5 - ATOL <= purity <= 1.0 + ATOL:
            raise QubitStateError(f"Density matrix purity {purity!r} outside [0.5, 1].")

    @classmethod
    def from_matrix(cls, matrix) -> "DensityMatrix":
        "Build from a 2x2 array, which must be Hermitian to within ``HERMITIAN_TOL``."
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise QubitStateError(f"Expected a 2x2 matrix; got shape {m.shape}.")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise QubitStateError(f"Matrix is not Hermitian:\n{m}")
        return cls(m[0, 0].real, m[1, 1].real, 0.5 * (m[0, 1] + np.conj(m[1, 0])))

    @classmethod
    def ground(cls) -> "DensityMatrix":
        "|0><0|"
        return cls(1.0, 0.0, 0.0)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        "I/2"
        return cls(0.5, 0.5, 0.0)

    @property
    def rho10(self) -> complex:
        "Lower off-diagonal element."
        return self.rho01.conjugate()

    @property
    def matrix(self) -> Cvec:
        "The full 2x2 matrix."
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    @property
    def determinant(self) -> float:
        "det(rho)."
        return self.rho00 * self.rho11 - abs(self.rho01) ** 2

    @property
    def purity(self) -> float:
        "tr(rho^2)."
        return self.rho00**2 + self.rho11**2 + 2.0 * abs(self.rho01) ** 2

    @property
    def coherence(self) -> float:
        "Magnitude of the off-diagonal element."
        return abs(self.rho01)

    def is_close(self, other: "DensityMatrix", tol: float = ATOL) -> bool:
        "Element-wise comparison."
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)


QubitState = Union[PureState, DensityMatrix]


def as_density(state: QubitState) -> DensityMatrix:
    "Promote a ``PureState`` to its ``DensityMatrix``; pass a ``DensityMatrix`` through."
    if isinstance(state, PureState):
        return state.density()
    if isinstance(state, DensityMatrix):
        return state
    raise TypeError(f"Not a qubit state: {state!r}")


def mix(states: Sequence[QubitState], weights: Iterable[float]) -> DensityMatrix:
    """
    Classical mixture sum(w_i rho_i).

    Args:
        states: The states to mix.
        weights: Non-negative weights, summing to one within 1e-9.

    Returns:
        The mixed state.

    Raises:
        QubitStateError: On bad weights.
    """
    w = np.asarray(list(weights), dtype=float)
    if len(w) != len(states) or not len(w):
        raise QubitStateError(f"Need one weight per state; got {len(w)} weights for {len(states)} states.")
    if np.any(w < 0):
        raise QubitStateError(f"Negative mixture weight in {w}.")
    total = w.sum()
    if abs(total - 1.0) > 1e-9:
        raise QubitStateError(f"Mixture weights sum to {total!r}, not one.")
    w = w / total  # Absorbs the permitted slack, so the trace invariant holds.
    rho = sum(wi * as_density(s).matrix for wi, s in zip(w, states))
    return DensityMatrix.from_matrix(rho)
