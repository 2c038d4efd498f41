"""Signal model configuration files (``.noise``).

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

A model is written as one S-expression, in the same syntax as run configurations::

    | Slow drift plus a test tone.
    (composite
        (static_gaussian (mean_hz 0) (sigma_hz 10k))
        (sinusoid (amplitude_hz 5k) (frequency_hz 100k) (phase random))
    )

Schema (angular quantities take either a ``_hz`` or a ``_rad_s`` key):

    ====================  ==================================================
    ``(constant ...)``    ``detuning``
    ``(static_gaussian)`` ``mean`` (default 0), ``sigma``
    ``(sinusoid ...)``    ``amplitude``, ``frequency_hz``, ``phase`` (radians, or ``random``; default 0)
    ``(ou ...)``          ``sigma``, ``tau_c_s``
    ``(piecewise_constant ...)``  ``(times_s t0 t1 ...)``, ``(values_hz ...)`` or ``(values_rad_s ...)``
    ``(composite ...)``   one or more of the above
    ``(none)``            no detuning at all
    ====================  ==================================================

``format_noise_config()`` writes ``_rad_s`` keys with 17 significant digits,
so a model survives a write/read cycle exactly.
"""

from pathlib import Path
from typing import Any, Callable, Optional, Union

from pyqsense.common import TWOPI, write_atomic
from pyqsense.config import ConfigError, format_sexpr, parse_sexpr
from pyqsense.noise.model import (
    Composite,
    Constant,
    NoiseModelError,
    OrnsteinUhlenbeck,
    PiecewiseConstant,
    SignalModel,
    Sinusoid,
    StaticGaussian,
)


class NoiseConfigError(NoiseModelError):
    """Base Exception for all noise configuration Errors."""


def _fields(kind: str, values: list) -> dict[str, list]:
    "Collect a model's ``(key value...)`` children."
    res: dict[str, list] = {}
    for item in values:
        if not isinstance(item, tuple):
            raise NoiseConfigError(f"Unexpected bare value '{item}' in '({kind} ...)'.")
        key, args = item
        if key in res:
            raise NoiseConfigError(f"Duplicate key '{key}' in '({kind} ...)'.")
        if any(isinstance(a, tuple) for a in args):
            raise NoiseConfigError(f"Key '{key}' in '({kind} ...)' must hold plain values.")
        res[key] = args
    return res


class _Fields:
    "Typed access to one model's fields, tracking which were used."

    def __init__(self, kind: str, values: list):
        self.kind = kind
        self.items = _fields(kind, values)
        self.used: set[str] = set()

    def _take(self, key: str) -> list:
        self.used.add(key)
        return self.items[key]

    def _scalar(self, key: str) -> Any:
        args = self._take(key)
        if len(args) != 1:
            raise NoiseConfigError(f"'{key}' in '({self.kind} ...)' takes one value; got {args}.")
        return args[0]

    def number(self, key: str, default: Optional[float] = None) -> float:
        "A plain number."
        if key not in self.items:
            if default is None:
                raise NoiseConfigError(f"'({self.kind} ...)' is missing '{key}'.")
            return default
        value = self._scalar(key)
        if not isinstance(value, float):
            raise NoiseConfigError(f"'{key}' in '({self.kind} ...)' must be a number; got '{value}'.")
        return value

    def angular(self, name: str, default: Optional[float] = None) -> float:
        "An angular frequency, from ``<name>_hz`` or ``<name>_rad_s``, in rad/s."
        hz_key, rad_key = f"{name}_hz", f"{name}_rad_s"
        if hz_key in self.items and rad_key in self.items:
            raise NoiseConfigError(f"Give only one of '{hz_key}' and '{rad_key}' in '({self.kind} ...)'.")
        if hz_key in self.items:
            return TWOPI * self.number(hz_key)
        if rad_key not in self.items and default is None:
            raise NoiseConfigError(f"'({self.kind} ...)' is missing '{hz_key}' (or '{rad_key}').")
        return self.number(rad_key, default)

    def angular_list(self, name: str) -> tuple[float, ...]:
        "A list of angular frequencies, in rad/s."
        hz_key, rad_key = f"{name}_hz", f"{name}_rad_s"
        scale = TWOPI if hz_key in self.items else 1.0
        key = hz_key if hz_key in self.items else rad_key
        return tuple(scale * v for v in self.numbers(key))

    def numbers(self, key: str) -> tuple[float, ...]:
        "A list of plain numbers."
        if key not in self.items:
            raise NoiseConfigError(f"'({self.kind} ...)' is missing '{key}'.")
        args = self._take(key)
        if not all(isinstance(a, float) for a in args):
            raise NoiseConfigError(f"'{key}' in '({self.kind} ...)' must hold numbers; got {args}.")
        return tuple(args)

    def phase(self) -> Optional[float]:
        "A phase in radians, or ``None`` for ``random``."
        if "phase" not in self.items:
            return 0.0
        value = self._scalar("phase")
        if value == "random":
            return None
        if not isinstance(value, float):
            raise NoiseConfigError(f"'phase' must be a number of radians or 'random'; got '{value}'.")
        return value

    def check_unused(self) -> None:
        "Reject unknown keys."
        extra = sorted(set(self.items) - self.used)
        if extra:
            raise NoiseConfigError(f"Unknown key(s) in '({self.kind} ...)': {extra}.")


def _constant(f: _Fields) -> SignalModel:
    return Constant(f.angular("detuning"))


def _static_gaussian(f: _Fields) -> SignalModel:
    return StaticGaussian(f.angular("mean", 0.0), f.angular("sigma"))


def _sinusoid(f: _Fields) -> SignalModel:
    return Sinusoid(f.angular("amplitude"), f.number("frequency_hz"), f.phase())


def _ou(f: _Fields) -> SignalModel:
    return OrnsteinUhlenbeck(f.angular("sigma"), f.number("tau_c_s"))


def _piecewise_constant(f: _Fields) -> SignalModel:
    return PiecewiseConstant(f.numbers("times_s"), f.angular_list("values"))


MODEL_READERS: dict[str, Callable[[_Fields], SignalModel]] = {
    "constant": _constant,
    "static_gaussian": _static_gaussian,
    "sinusoid": _sinusoid,
    "ou": _ou,
    "piecewise_constant": _piecewise_constant,
}


def model_from_tree(label: str, values: list) -> Optional[SignalModel]:
    """
    Build a model from a parsed ``(label, values)`` tree.

    Raises:
        NoiseConfigError: Unknown model kind, bad field, or invalid parameter value.
    """
    if label == "none":
        if values:
            raise NoiseConfigError("'(none)' takes no values.")
        return None
    if label == "composite":
        if not values or not all(isinstance(v, tuple) for v in values):
            raise NoiseConfigError("'(composite ...)' holds one or more model expressions.")
        parts = [model_from_tree(*v) for v in values]
        if any(p is None for p in parts):
            raise NoiseConfigError("'(none)' can't be part of a composite.")
        return Composite(tuple(parts))  # type: ignore[arg-type]
    if label not in MODEL_READERS:
        raise NoiseConfigError(
            f"Unknown noise model '{label}'; expected one of {list(MODEL_READERS) + ['composite', 'none']}."
        )
    f = _Fields(label, values)
    try:
        model = MODEL_READERS[label](f)
    except NoiseConfigError:
        raise
    except NoiseModelError as err:
        raise NoiseConfigError(f"Invalid '({label} ...)': {err}") from err
    f.check_unused()
    return model


def parse_noise_config(text: str) -> Optional[SignalModel]:
    """
    Parse noise configuration text.

    Returns:
        The model, or ``None`` for ``(none)``.

    Raises:
        NoiseConfigError: Malformed text or invalid model.
    """
    try:
        label, values = parse_sexpr(text)
    except ConfigError as err:
        raise NoiseConfigError(str(err)) from err
    return model_from_tree(label, values)


def model_to_tree(model: Optional[SignalModel]) -> tuple[str, list]:
    "The ``(label, values)`` tree for a model; the inverse of ``model_from_tree()``."
    if model is None:
        return ("none", [])
    if isinstance(model, Constant):
        return ("constant", [("detuning_rad_s", [model.detuning])])
    if isinstance(model, StaticGaussian):
        return ("static_gaussian", [("mean_rad_s", [model.mean]), ("sigma_rad_s", [model.sigma])])
    if isinstance(model, Sinusoid):
        phase = "random" if model.random_phase else model.phase
        return (
            "sinusoid",
            [
                ("amplitude_rad_s", [model.amplitude]),
                ("frequency_hz", [model.frequency]),
                ("phase", [phase]),
            ],
        )
    if isinstance(model, OrnsteinUhlenbeck):
        return ("ou", [("sigma_rad_s", [model.sigma]), ("tau_c_s", [model.tau_c])])
    if isinstance(model, PiecewiseConstant):
        return ("piecewise_constant", [("times_s", list(model.times)), ("values_rad_s", list(model.values))])
    if isinstance(model, Composite):
        return ("composite", [model_to_tree(m) for m in model.models])
    raise NoiseConfigError(f"No configuration form for {type(model).__name__}.")


def format_noise_config(model: Optional[SignalModel]) -> str:
    "Render a model as configuration text."
    return format_sexpr(*model_to_tree(model)) + "\n"


def read_noise_config(path: Union[str, Path]) -> Optional[SignalModel]:
    "Read a ``.noise`` file."
    with open(path, "rt", encoding="utf-8") as noise_file:
        return parse_noise_config(noise_file.read())


def write_noise_config(path: Union[str, Path], model: Optional[SignalModel]) -> Path:
    "Write a ``.noise`` file."
    return write_atomic(path, format_noise_config(model))
