"""S-expression configuration files, SI-suffixed numbers, and sweep specifications.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Configuration files use a small S-expression syntax, with ``|`` comments::

    | Decoherence study
    (run
        (command decay)
        (builder cpmg) (param n 8)
        (sweep "tau=1us:100us:40:log")
        (realizations 2000)
    )

Numbers take an optional SI multiplier (``T G M k m u n p f``, case sensitive),
optionally followed by unit letters, which are ignored: ``50kHz``, ``5us``, ``1mT``.
"""

import re
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from parsec import ParseError, generate, many, many1, regex, string

from pyqsense.common import SI_SUFFIXES

DBG = False


class ConfigError(ValueError):
    """Base Exception for all configuration Errors."""


#####
# Numbers
#####

NUMBER_RE = r"[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?"
_si_number = re.compile(rf"({NUMBER_RE})([{''.join(SI_SUFFIXES)}]?)([a-zA-Zµμ]*)")


def parse_number(text: str) -> float:
    """
    Convert a number with optional SI suffix and unit letters to a float.

    Examples: ``"5us"`` -> 5e-6, ``"-2MHz"`` -> -2e6, ``"0.3"`` -> 0.3.

    Raises:
        ConfigError: Not a number.
    """
    m = _si_number.fullmatch(text.strip())
    if not m:
        raise ConfigError(f"Not a number: '{text}'.")
    mantissa, suffix = m.group(1), m.group(4)
    return float(mantissa + SI_SUFFIXES[suffix]) if suffix else float(mantissa)


#####
# S-expression grammar
#####

whitespace = regex(r"\s+", re.MULTILINE)
comment = regex(r"\|.*")
ignore = many(whitespace | comment)


def lexeme(p):
    """Lexer for words."""
    return p << ignore  # skip all ignored characters.


lparen = lexeme(string("("))
rparen = lexeme(string(")"))
number = lexeme(regex(_si_number.pattern).parsecmap(parse_number))
symbol = lexeme(regex(r"[a-zA-Z_][^\s()]*"))
quoted_string = lexeme(regex(r'"[^"]*"')).parsecmap(lambda s: s[1:-1])
atom = number | quoted_string | symbol


@generate("config node")
def node():
    "Parse a parenthesized node: a label, then atoms and/or sub-nodes."
    yield lparen
    label = yield symbol
    values = yield many(expr)
    yield rparen
    return (label, values)


expr = atom | node
config_file = ignore >> node
config_forest = ignore >> many1(node)


def parse_sexpr(text: str) -> tuple[str, list]:
    """
    Parse one top-level S-expression.

    Returns:
        (label, values): ``values`` mixes atoms (str/float) and nested (label, values) pairs.

    Raises:
        ConfigError: Malformed text, with its location.
    """
    try:
        return config_file.parse_strict(text)
    except ParseError as pe:
        line, col = ParseError.loc_info(pe.text, pe.index)
        raise ConfigError(f"Expected {pe.expected} at line {line + 1}, column {col + 1}.") from pe


def format_atom(value: Any) -> str:
    "Render one atom."
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    text = str(value)
    if re.fullmatch(r"[a-zA-Z_][^\s()\"|]*", text):
        return text
    return f'"{text}"'


def format_sexpr(label: str, values: list, indent: str = "") -> str:
    "Render a (label, values) tree; the inverse of ``parse_sexpr()``."
    if all(not isinstance(v, tuple) for v in values):
        return indent + "(" + " ".join([label] + [format_atom(v) for v in values]) + ")"
    lines = [f"{indent}({label}"]
    for v in values:
        if isinstance(v, tuple):
            lines.append(format_sexpr(v[0], v[1], indent + "    "))
        else:
            lines.append(indent + "    " + format_atom(v))
    lines.append(f"{indent})")
    return "\n".join(lines)


#####
# Run configuration
#####

# Keys that may repeat, collecting a list.
MULTI_KEYS = ("param", "builder")


def parse_run_config(text: str) -> dict[str, Any]:
    """
    Parse a ``.run`` file into a dictionary keyed like the command line's long options.

    ``(param n 8)`` entries collect into ``{"param": ["n=8", ...]}``;
    other single-valued entries map to their value.

    Raises:
        ConfigError: Malformed file, or an unexpected top-level label.
    """
    label, values = parse_sexpr(text)
    if label != "run":
        raise ConfigError(f"Expected a '(run ...)' configuration; found '({label} ...)'.")
    res: dict[str, Any] = {}
    for item in values:
        if not isinstance(item, tuple):
            raise ConfigError(f"Unexpected bare value '{item}' in run configuration.")
        key, args = item
        if DBG:
            print(f"run config: {key} = {args}")
        if any(isinstance(a, tuple) for a in args):
            raise ConfigError(f"Entry '{key}' must hold plain values.")
        if key == "param":
            if len(args) != 2:
                raise ConfigError(f"'(param NAME VALUE)' expected; got {args}.")
            res.setdefault("param", []).append(f"{args[0]}={format_atom(args[1])}")
        elif key in MULTI_KEYS:
            res.setdefault(key, []).extend(str(a) for a in args)
        elif len(args) != 1:
            raise ConfigError(f"Entry '{key}' takes exactly one value; got {args}.")
        else:
            res[key] = args[0]
    return res


#####
# Sweep specifications
#####

# Sweep variables, and the factor converting their human units to SI / rad/s.
SWEEP_VARIABLES = {
    "tau": 1.0,  # s
    "T": 1.0,  # s
    "n": 1.0,  # pulse count
    "detuning": 2.0 * np.pi,  # Hz -> rad/s
    "freq": 2.0 * np.pi,  # Hz -> rad/s
}

SWEEP_UNITS = {"tau": "s", "T": "s", "n": "", "detuning": "rad_per_s", "freq": "rad_per_s"}


@dataclass(frozen=True)
class SweepSpec:
    "A swept variable and its values, in SI units (angular frequencies in rad/s)."

    variable: str
    values: tuple[float, ...]
    text: str = ""

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"Unknown sweep variable '{self.variable}'; expected one of {list(SWEEP_VARIABLES)}.")
        if not self.values:
            raise ConfigError("Empty sweep.")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.variable == "n" and any(v != int(v) or v < 1 for v in self.values):
            raise ConfigError(f"Pulse counts must be positive integers; got {self.values}.")
        if self.variable in ("tau", "T") and any(v <= 0 for v in self.values):
            raise ConfigError(f"Times must be positive; got {self.values}.")

    @property
    def column(self) -> str:
        "CSV column header for the variable."
        unit = SWEEP_UNITS[self.variable]
        return f"{self.variable}_{unit}" if unit else self.variable

    def __len__(self) -> int:
        return len(self.values)


sweep_name = regex(r"\s*[a-zA-Z_]+\s*") << string("=")
sweep_number = regex(r"\s*" + _si_number.pattern + r"\s*").parsecmap(parse_number)
sweep_count = regex(r"\s*\d+\s*").parsecmap(int)


@generate("sweep range")
def sweep_range():
    "start:stop:count[:log]"
    start = yield sweep_number << string(":")
    stop = yield sweep_number << string(":")
    count = yield sweep_count
    scale = yield (string(":") >> regex(r"\s*(lin|log)\s*")) | regex("").result("lin")
    return ("range", start, stop, count, scale.strip())


@generate("sweep list")
def sweep_list():
    "v1,v2,..."
    first = yield sweep_number
    rest = yield many(string(",") >> sweep_number)
    return ("list", [first] + rest)


@generate("sweep specification")
def sweep_spec():
    "NAME=range | NAME=list"
    name = yield sweep_name
    body = yield sweep_range ^ sweep_list
    return (name.strip(), body)


def parse_sweep(text: str) -> SweepSpec:
    """
    Parse a sweep specification.

    Forms: ``tau=0.1us:2us:200`` (linear), ``tau=1us:100us:40:log``, ``n=1,2,4,8``.
    Times are in seconds and detunings/frequencies in Hz, with SI suffixes;
    the resultant values are SI, with angular frequencies in rad/s.

    Raises:
        ConfigError: Malformed or empty sweep.
    """
    try:
        name, body = sweep_spec.parse_strict(text)
    except ParseError as pe:
        raise ConfigError(f"Bad sweep '{text}': expected {pe.expected} at column {pe.index + 1}.") from pe
    if name not in SWEEP_VARIABLES:
        raise ConfigError(f"Unknown sweep variable '{name}'; expected one of {list(SWEEP_VARIABLES)}.")
    if body[0] == "range":
        _, start, stop, count, scale = body
        if count < 1:
            raise ConfigError(f"Empty sweep: '{text}'.")
        if scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"Logarithmic sweeps need positive limits: '{text}'.")
            values = np.geomspace(start, stop, count)
        else:
            values = np.linspace(start, stop, count)
    else:
        values = np.array(body[1])
    return SweepSpec(name, tuple(values * SWEEP_VARIABLES[name]), text)


def parse_assignments(items: Union[list[str], tuple[str, ...]]) -> dict[str, float]:
    """
    Parse ``NAME=VALUE`` strings (SI suffixes allowed) into a dictionary.

    Raises:
        ConfigError: Malformed item.
    """
    res = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"Expected NAME=VALUE; got '{item}'.")
        key, val = item.split("=", 1)
        res[key.strip()] = parse_number(val)
    return res
