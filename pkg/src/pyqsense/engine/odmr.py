"""Optically detected magnetic resonance scans.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from pyqsense.analysis.sensitivity import SensorSpec
from pyqsense.common import Rvec, table_csv, write_atomic


@dataclass(frozen=True, eq=False)
class OdmrScan:
    "Normalized fluorescence versus drive frequency."

    omega: Rvec  # rad/s
    fluorescence: Rvec
    resonance: float  # rad/s
    linewidth: float  # rad/s, half width at half depth
    contrast: float

    @property
    def dip(self) -> float:
        "Drive frequency of the lowest sampled fluorescence."
        return float(self.omega[np.argmin(self.fluorescence)])

    def table(self) -> tuple[list[str], np.ndarray]:
        "(headers, rows)"
        return ["omega_rad_per_s", "freq_hz", "fluorescence"], np.column_stack(
            [self.omega, self.omega / (2.0 * np.pi), self.fluorescence]
        )

    def to_csv(self) -> str:
        "CSV text."
        return table_csv(*self.table())

    def write_csv(self, path: Union[str, Path]) -> Path:
        "Export to CSV."
        return write_atomic(path, self.to_csv())


def odmr_scan(omega, field: float, spec: SensorSpec, linewidth: float, contrast: float) -> OdmrScan:
    """
    Lorentzian fluorescence dip, shifted by the Zeeman effect.

    ``F(omega) = 1 - contrast / (1 + ((omega - omega0 - gamma B) / linewidth)^2)``

    Args:
        omega: Drive frequencies (rad/s).
        field: Magnetic field (T).
        spec: Sensor constants (``omega0``, ``gamma``).
        linewidth: Half width at half depth (rad/s), > 0.
        contrast: Dip depth, in [0, 1].

    Returns:
        The scan; its minimum sits exactly at ``omega0 + gamma B``.

    Raises:
        ValueError: Non-positive linewidth, or contrast outside [0, 1].
    """
    if not linewidth > 0:
        raise ValueError(f"Linewidth must be positive; got {linewidth}.")
    if not 0 <= contrast <= 1:
        raise ValueError(f"Contrast must lie in [0, 1]; got {contrast}.")
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    resonance = spec.omega0 + spec.gamma * field
    x = (omega - resonance) / linewidth
    return OdmrScan(omega, 1.0 - contrast / (1.0 + x * x), float(resonance), float(linewidth), float(contrast))
