"""Pulse sequence data model and the canonical sequence builders.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Timeline convention: time zero is the end of the opening pulse, and the
sequence's total time ``T`` runs from there to the start of the closing pulse.
A finite duration pi pulse takes effect (for the sensitivity function) at its centre.
"""

from dataclasses import dataclass, field
from enum import Enum
from inspect import signature
from typing import Any, Iterator, Optional, Union

import numpy as np

from pyqsense.common import PI
from pyqsense.qubit.propagator import AXES, rotation_propagator


class SequenceError(ValueError):
    """Base Exception for all pulse sequence Errors."""


class InvalidSequenceError(SequenceError):
    """A sequence is not bracketed by pi/2 pulses, or cannot be reduced to a sensitivity function."""


class PulseKind(Enum):
    "Pulse flavours, tagged with their text language keywords."

    PI = "pi"
    PI_HALF = "p2"
    ARBITRARY = "rot"


@dataclass(frozen=True)
class Pulse:
    """
    A rotation about a transverse (or z) axis.

    ``angle`` is implied for ``PI`` and ``PI_HALF`` pulses; ``duration`` zero means an ideal,
    instantaneous pulse.
    """

    kind: PulseKind
    axis: str = "y"
    angle: Optional[float] = None
    duration: float = 0.0

    def __post_init__(self):
        axis = self.axis.strip().lower().lstrip("+")
        if axis not in AXES:
            raise SequenceError(f"Unknown pulse axis: '{self.axis}'; expected one of {AXES}.")
        object.__setattr__(self, "axis", axis)
        if self.kind is PulseKind.PI:
            object.__setattr__(self, "angle", PI)
        elif self.kind is PulseKind.PI_HALF:
            object.__setattr__(self, "angle", PI / 2)
        elif self.angle is None:
            raise SequenceError("An arbitrary rotation needs an angle.")
        else:
            object.__setattr__(self, "angle", float(self.angle))
        if self.duration < 0:
            raise SequenceError(f"Pulse duration must be non-negative; got {self.duration}.")
        object.__setattr__(self, "duration", float(self.duration))

    @property
    def is_ideal(self) -> bool:
        "Instantaneous?"
        return self.duration == 0.0

    @property
    def is_pi(self) -> bool:
        "Does this pulse invert the sensitivity function?"
        if self.kind is PulseKind.PI:
            return True
        return (
            self.kind is PulseKind.ARBITRARY
            and self.axis.lstrip("-") != "z"  # noqa: W503
            and abs(abs(self.angle) - PI) < 1e-12  # noqa: W503
        )

    @property
    def rabi_freq(self) -> float:
        "Rabi frequency (rad/s) of a finite pulse."
        if self.is_ideal:
            raise SequenceError("An ideal pulse has no finite Rabi frequency.")
        return abs(self.angle) / self.duration

    @property
    def drive_axis(self) -> str:
        "Drive axis, with the angle's sign folded in."
        if self.angle >= 0:
            return self.axis
        return self.axis[1:] if self.axis.startswith("-") else "-" + self.axis


@dataclass(frozen=True)
class Delay:
    "Free evolution of strictly positive duration."

    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise SequenceError(f"Delay must be positive; got {self.duration}.")
        object.__setattr__(self, "duration", float(self.duration))


Event = Union[Pulse, Delay]


@dataclass(frozen=True)
class TimedEvent:
    "An event, placed on the sequence timeline."

    event: Event
    start: float
    stop: float


@dataclass(frozen=True)
class PulseSequence:
    "Ordered pulses and delays."

    events: tuple[Event, ...]
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for event in self.events:
            if not isinstance(event, (Pulse, Delay)):
                raise SequenceError(f"Not a sequence event: {event!r}")

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    @property
    def pulses(self) -> list[Pulse]:
        "Pulses, in order."
        return [e for e in self.events if isinstance(e, Pulse)]

    @property
    def delays(self) -> list[Delay]:
        "Delays, in order."
        return [e for e in self.events if isinstance(e, Delay)]

    @property
    def is_ideal(self) -> bool:
        "True when every pulse is instantaneous."
        return all(p.is_ideal for p in self.pulses)

    def timeline(self) -> list[TimedEvent]:
        """
        Events placed in time.

        Time zero is the end of the opening pulse (or the sequence start,
        when the sequence opens with a delay).
        """
        t = 0.0
        if self.events and isinstance(self.events[0], Pulse):
            t = -self.events[0].duration
        res = []
        for event in self.events:
            res.append(TimedEvent(event, t, t + event.duration))
            t += event.duration
        return res

    @property
    def total_time(self) -> float:
        "Free evolution span, from the end of the first pulse to the start of the last."
        placed = self.timeline()
        if not placed:
            return 0.0
        stop = placed[-1].start if isinstance(placed[-1].event, Pulse) else placed[-1].stop
        return max(stop, 0.0)

    @property
    def pi_times(self) -> list[float]:
        "Centre times of the interior pi pulses."
        placed = self.timeline()
        return [0.5 * (te.start + te.stop) for te in placed[1:-1] if isinstance(te.event, Pulse) and te.event.is_pi]

    def check_brackets(self) -> None:
        """
        Verify this is a valid sensing sequence.

        Raises:
            InvalidSequenceError: If the first and last pulses aren't pi/2 pulses,
                or there is no free evolution.
        """
        pulses = self.pulses
        if len(pulses) < 2:
            raise InvalidSequenceError("A sensing sequence needs opening and closing pi/2 pulses.")
        if pulses[0].kind is not PulseKind.PI_HALF or not isinstance(self.events[0], Pulse):
            raise InvalidSequenceError("A sensing sequence must open with a pi/2 pulse.")
        if pulses[-1].kind is not PulseKind.PI_HALF or not isinstance(self.events[-1], Pulse):
            raise InvalidSequenceError("A sensing sequence must close with a pi/2 pulse.")
        if not self.delays:
            raise InvalidSequenceError("A sensing sequence needs at least one delay.")

    def zero_phase_population(self) -> float:
        "Final |1> population from |0>, with ideal pulses and no detuning."
        u = np.eye(2, dtype=complex)
        for pulse in self.pulses:
            u = rotation_propagator(pulse.axis, pulse.angle) @ u
        return float(abs(u[1, 0]) ** 2)

    def is_phase_matched(self) -> bool:
        "Do the pulses, applied ideally with no detuning, take |0> to |1>?"
        return self.zero_phase_population() > 1.0 - 1e-9


#####
# Builders
#####


def _closing_axis(n_pi: int) -> str:
    "Closing pi/2 axis that maps zero phase to |1>, after ``n_pi`` pi pulses about y."
    return "y" if n_pi % 2 == 0 else "-y"


def _positive(name: str, value: float) -> float:
    if not value > 0:
        raise SequenceError(f"'{name}' must be positive; got {value}.")
    return float(value)


def _count(n: int) -> int:
    if int(n) != n or n < 1:
        raise SequenceError(f"Pulse count must be a positive integer; got {n}.")
    return int(n)


def ramsey(tau: float) -> PulseSequence:
    "pi/2 - tau - pi/2"
    tau = _positive("tau", tau)
    return PulseSequence((Pulse(PulseKind.PI_HALF), Delay(tau), Pulse(PulseKind.PI_HALF)), name="ramsey")


def cpmg(n: int, tau: float) -> PulseSequence:
    """
    Carr-Purcell-Meiboom-Gill train.

    pi/2 - tau/2 - pi - tau - pi - ... - pi - tau/2 - pi/2, with ``n`` pi pulses and ``T = n tau``.
    Odd ``n`` closes about -y, so that every built sequence sends zero phase to |1>.

    Args:
        n: Number of pi pulses, >= 1.
        tau: Pulse spacing (s).
    """
    n = _count(n)
    tau = _positive("tau", tau)
    events: list[Event] = [Pulse(PulseKind.PI_HALF), Delay(tau / 2)]
    for k in range(n):
        events.append(Pulse(PulseKind.PI))
        events.append(Delay(tau if k < n - 1 else tau / 2))
    events.append(Pulse(PulseKind.PI_HALF, _closing_axis(n)))
    return PulseSequence(tuple(events), name="cpmg")


def hahn(tau: float) -> PulseSequence:
    "Hahn echo; identical to ``cpmg(1, tau)``."
    return PulseSequence(cpmg(1, tau).events, name="hahn")


def uhrig_times(n: int, T: float) -> list[float]:
    "Uhrig pi pulse placements, T sin^2(pi j / (2n + 2)), j = 1..n."
    return [T * np.sin(PI * j / (2 * n + 2)) ** 2 for j in range(1, n + 1)]


def uhrig(n: int, T: float) -> PulseSequence:
    """
    Uhrig dynamical decoupling.

    Args:
        n: Number of pi pulses, >= 1.
        T: Total free evolution time (s).
    """
    n = _count(n)
    T = _positive("T", T)
    edges = [0.0] + uhrig_times(n, T) + [T]
    events: list[Event] = [Pulse(PulseKind.PI_HALF)]
    for k in range(n + 1):
        events.append(Delay(edges[k + 1] - edges[k]))
        if k < n:
            events.append(Pulse(PulseKind.PI))
    events.append(Pulse(PulseKind.PI_HALF, _closing_axis(n)))
    return PulseSequence(tuple(events), name="uhrig")


BUILDERS = {
    "ramsey": ramsey,
    "hahn": hahn,
    "cpmg": cpmg,
    "uhrig": uhrig,
}


@dataclass(frozen=True)
class SequenceFamily:
    """
    A builder plus its fixed parameters.

    Sweeps over ``tau`` (pulse spacing), ``T`` (total time) or ``n`` (pulse count)
    fill in the remaining parameter. For ``uhrig``, ``tau`` means ``T / n``; for
    ``cpmg``, ``T`` means ``n tau``.
    """

    builder: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.builder not in BUILDERS:
            raise SequenceError(f"Unknown sequence builder: '{self.builder}'; expected one of {list(BUILDERS)}.")
        unknown = set(self.params) - set(self.parameter_names) - {"T", "tau"}
        if unknown:
            raise SequenceError(f"Builder '{self.builder}' takes no parameter(s): {sorted(unknown)}.")

    @property
    def parameter_names(self) -> tuple[str, ...]:
        "The builder's own parameter names."
        return tuple(signature(BUILDERS[self.builder]).parameters)

    @property
    def label(self) -> str:
        "Short name, e.g. ``cpmg8``."
        if "n" in self.params and "n" in self.parameter_names:
            return f"{self.builder}{int(self.params['n'])}"
        return self.builder

    def accepts(self, variable: str) -> bool:
        "Can this family be swept over ``variable``?"
        if variable in ("tau", "T"):
            return True
        return variable in self.parameter_names

    def build(self, **overrides) -> PulseSequence:
        """
        Build one member of the family.

        Raises:
            SequenceError: A required parameter is missing.
        """
        values = dict(self.params)
        values.update(overrides)
        names = self.parameter_names
        n = values.get("n", 1)
        if "tau" in values and "tau" not in names:  # uhrig
            values.setdefault("T", values.pop("tau") * n)
        if "T" in values and "T" not in names:  # ramsey, hahn, cpmg
            values.setdefault("tau", values.pop("T") / (n if "n" in names else 1))
        missing = [name for name in names if name not in values]
        if missing:
            raise SequenceError(f"Builder '{self.builder}' is missing parameter(s): {missing}.")
        return BUILDERS[self.builder](**{name: values[name] for name in names})
