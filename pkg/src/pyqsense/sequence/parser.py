"""Pulse sequence text language: parser, formatter and ``.seq`` file I/O.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.

Grammar (case-insensitive; statements separated by ``;`` or newlines; ``#`` comments)::

    statement := "p2"  <axis> [<duration>]
               | "pi"  <axis> [<duration>]
               | "rot" <angle> <axis> [<duration>]
               | "wait" <duration>
    axis      := ["+" | "-"] ("x" | "y" | "z")
    angle     := <number> ["pi"]                   (radians, or multiples of pi)
    duration  := <number> ("ns" | "us" | "µs" | "ms" | "s")

Time units are mandatory. A pulse without a duration is ideal (instantaneous).

Example::

    # Hahn echo, 1 us total
    p2 y; wait 0.5us
    pi y
    wait 0.5us; p2 -y
"""

from pathlib import Path
from typing import Union

from parsec import ParseError, eof, generate, many, many1, optional, regex, string

from pyqsense.common import PI, TIME_UNITS, format_float, write_atomic
from pyqsense.qubit.propagator import AXES
from pyqsense.sequence.model import (
    Delay,
    Pulse,
    PulseKind,
    PulseSequence,
    SequenceError,
)

DBG = False


class SequenceParseError(SequenceError):
    """Base Exception for all sequence text Errors; carries a 1-based line and column."""

    def __init__(self, msg: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class SequenceSyntaxError(SequenceParseError):
    """Text that doesn't fit the grammar."""


class NonPositiveDelayError(SequenceParseError):
    """A ``wait`` of zero or negative length."""


class UnknownAxisError(SequenceParseError):
    """An axis name other than x, y or z."""


#####
# Lexical elements
#####

hspace = regex(r"[ \t\r]*")
comment = regex(r"#[^\n]*")


def lexeme(p):
    """Lexer for words.

    Skips horizontal space only; newlines are statement separators.
    """
    return p << hspace


separator = lexeme(regex(r"[;\n]")) | lexeme(comment)
separators = many(separator)
terminator = many1(separator) | eof()
at_end = optional(eof().result(True), False)

keyword = lexeme(regex(r"(p2|pi|rot|wait)\b")).desc("statement keyword (p2, pi, rot, wait)")
number = lexeme(regex(r"[-+]?(\d+\.?\d*|\.\d+)(e[-+]?\d+)?")).parsecmap(float).desc("number")
unit = lexeme(regex("|".join(sorted(TIME_UNITS, key=len, reverse=True)))).desc("time unit (ns, us, ms, s)")
axis_name = lexeme(regex(r"[-+]?[a-z_][a-z0-9_]*")).desc("axis (x, y, z)")
pi_factor = lexeme(string("pi")).result(PI)


def _where(pos):
    "1-based (line, column) from a parsec zero-based mark."
    return pos[0] + 1, pos[1] + 1


@generate("duration")
def duration():
    "Parse a number with its mandatory time unit."
    value = yield number
    scale = yield unit
    return value * TIME_UNITS[scale]


@generate("axis")
def axis():
    "Parse and check an axis name."
    start, name, _ = yield axis_name.mark()
    name = name.lstrip("+")
    if name not in AXES:
        raise UnknownAxisError(f"unknown axis '{name}'; expected one of {', '.join(AXES)}", *_where(start))
    return name


@generate("angle")
def angle():
    "Parse a rotation angle, in radians or multiples of pi."
    value = yield number
    factor = yield optional(pi_factor, 1.0)
    return value * factor


@generate("pulse duration")
def pulse_duration():
    "Parse an optional, non-negative pulse duration."
    start, value, _ = yield duration.mark()
    if value < 0:
        raise SequenceSyntaxError(f"pulse duration must be non-negative; got {value!r} s", *_where(start))
    return value


@generate("statement")
def statement():
    "Parse one statement."
    word = yield keyword
    if word == "wait":
        start, value, _ = yield duration.mark()
        if not value > 0:
            raise NonPositiveDelayError(f"wait must be positive; got {value!r} s", *_where(start))
        return Delay(value)
    if word == "rot":
        theta = yield angle
        ax = yield axis
        dur = yield optional(pulse_duration, 0.0)
        return Pulse(PulseKind.ARBITRARY, ax, theta, dur)
    ax = yield axis
    dur = yield optional(pulse_duration, 0.0)
    return Pulse(PulseKind(word), ax, None, dur)


@generate("pulse sequence")
def program():
    "Parse a complete pulse sequence."
    yield hspace
    yield separators
    events = []
    while not (yield at_end):
        event = yield statement
        if DBG:
            print(f"Parsed: {event}")
        events.append(event)
        yield terminator
    return events


def parse_sequence(text: str, name: str = "custom") -> PulseSequence:
    """
    Parse pulse sequence text.

    Args:
        text: Sequence text, in the grammar above.

    Keyword Args:
        name: Name to give the resultant sequence (Default = "custom").

    Returns:
        The parsed sequence.

    Raises:
        SequenceSyntaxError: Malformed text.
        NonPositiveDelayError: A ``wait`` of zero or negative length.
        UnknownAxisError: A bad axis name.
    """
    try:
        events = program.parse(text.lower())
    except ParseError as pe:
        line, col = ParseError.loc_info(pe.text, pe.index)
        found = pe.text[pe.index : pe.index + 10].split("\n")[0]
        raise SequenceSyntaxError(f"expected {pe.expected}, found '{found}'", line + 1, col + 1) from pe
    return PulseSequence(tuple(events), name=name)


#####
# Formatting
#####


def format_duration(seconds: float) -> str:
    "Shortest readable duration text that parses back to exactly ``seconds``."
    for suffix in ("us", "ns", "ms", "s"):
        scale = TIME_UNITS[suffix]
        mantissa = f"{seconds / scale:.12g}"
        if float(mantissa) * scale == seconds:
            return f"{mantissa}{suffix}"
    return f"{format_float(seconds)}s"


def format_event(event) -> str:
    "One statement of text."
    if isinstance(event, Delay):
        return f"wait {format_duration(event.duration)}"
    if event.kind is PulseKind.ARBITRARY:
        res = f"rot {format_float(event.angle)} {event.axis}"
    else:
        res = f"{event.kind.value} {event.axis}"
    if not event.is_ideal:
        res += f" {format_duration(event.duration)}"
    return res


def format_sequence(seq: PulseSequence) -> str:
    """
    Render a sequence as text, one statement per line.

    ``parse_sequence(format_sequence(seq))`` reproduces ``seq``.
    """
    return "".join(f"{format_event(event)}\n" for event in seq)


def read_sequence(path: Union[str, Path]) -> PulseSequence:
    "Parse a ``.seq`` file."
    path = Path(path)
    with open(path, "rt", encoding="utf-8") as seq_file:
        text = seq_file.read()
    return parse_sequence(text, name=path.stem)


def write_sequence(path: Union[str, Path], seq: PulseSequence) -> Path:
    "Write a ``.seq`` file."
    return write_atomic(path, format_sequence(seq))
