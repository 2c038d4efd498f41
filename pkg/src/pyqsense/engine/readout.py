"""Projection-noise limited readout.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

A point measured ``M`` times on each of ``N`` sensors yields ``M N / M0``
effective binary outcomes, each a success with probability
``p' = 1/2 + c (p - 1/2)``. The success fraction is mapped back through the
contrast ``c`` to estimate ``p``.
"""

from dataclasses import asdict, dataclass

import numpy as np

from pyqsense.common import Rvec


class ReadoutConfigError(ValueError):
    """Base Exception for all readout configuration Errors."""


@dataclass(frozen=True)
class ReadoutConfig:
    "Measurement statistics for one sweep point."

    reps: int = 1000  # M, repetitions per point
    sensors: int = 1  # N, parallel sensors
    m0: float = 1.0  # repetitions per effective single-shot readout
    contrast: float = 1.0  # c
    seed: int = 0  # root seed

    def __post_init__(self):
        if int(self.reps) != self.reps or self.reps < 1:
            raise ReadoutConfigError(f"Repetitions must be a positive integer; got {self.reps}.")
        if int(self.sensors) != self.sensors or self.sensors < 1:
            raise ReadoutConfigError(f"Sensor count must be a positive integer; got {self.sensors}.")
        if not self.m0 >= 1:
            raise ReadoutConfigError(f"M0 must be at least one; got {self.m0}.")
        if not 0 < self.contrast <= 1:
            raise ReadoutConfigError(f"Contrast must be in (0, 1]; got {self.contrast}.")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ReadoutConfigError(f"Seed must be a non-negative integer; got {self.seed}.")
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "sensors", int(self.sensors))
        object.__setattr__(self, "m0", float(self.m0))
        object.__setattr__(self, "contrast", float(self.contrast))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def shots(self) -> int:
        "M N"
        return self.reps * self.sensors

    @property
    def draws(self) -> int:
        "Effective binary outcomes per point, floor(M N / M0), at least one."
        return max(1, int(np.floor(self.shots / self.m0)))

    @property
    def penalty(self) -> float:
        "Precision penalty of imperfect readout, sqrt(M0)/c."
        return float(np.sqrt(self.m0) / self.contrast)

    def sigma_p(self, p: float = 0.5) -> float:
        "Expected standard error of the population estimate at ``p``."
        p_prime = 0.5 + self.contrast * (p - 0.5)
        return float(np.sqrt(p_prime * (1.0 - p_prime) / self.draws) / self.contrast)

    def as_dict(self) -> dict:
        "Plain dictionary form."
        return asdict(self)


def simulate_readout(p, readout: ReadoutConfig, rng: np.random.Generator) -> tuple[Rvec, Rvec]:
    """
    Simulate the binomial readout of true populations.

    Args:
        p: True |1> population(s).
        readout: Measurement statistics.
        rng: Generator for the draws.

    Returns:
        (p_hat, stderr): Estimates, clipped to [0, 1], and their standard errors.
        A standard error is computed from the observed success fraction,
        falling back to the (k+1)/(n+2) estimate when every draw agreed,
        so it is always positive.
    """
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    c = readout.contrast
    n = readout.draws
    k = rng.binomial(n, 0.5 + c * (p - 0.5))
    frac = k / n
    p_hat = np.clip(0.5 + (frac - 0.5) / c, 0.0, 1.0)
    q = np.where((k > 0) & (k < n), frac, (k + 1) / (n + 2))
    stderr = np.sqrt(q * (1.0 - q) / n) / c
    return p_hat, stderr
