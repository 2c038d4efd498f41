"""
Definitions common to all PyQSense modules.

Original author: David Banas <capn.freako@gmail.com>

Original date:   October 18, 2026

Copyright (c) 2026 David Banas; all rights reserved World wide.
"""

import json
import os
import tempfile
from io import StringIO
from pathlib import Path
from typing import Union

import numpy as np
import numpy.typing as npt  # type: ignore
from typing_extensions import TypeAlias, TypeVar

Real = TypeVar("Real", float, float)
Comp = TypeVar("Comp", complex, complex)
Rvec: TypeAlias = npt.NDArray[Real]
Cvec: TypeAlias = npt.NDArray[Comp]

PI: float = 3.141592653589793238462643383279502884
TWOPI: float = 2.0 * PI

# Numerical tolerance used by the state invariants.
ATOL: float = 1e-12

# Explicit time units accepted by the sequence language.
TIME_UNITS = {
    "ns": 1e-9,
    "us": 1e-6,
    "µs": 1e-6,  # micro sign
    "μs": 1e-6,  # greek mu
    "ms": 1e-3,
    "s": 1.0,
}

# SI multiplier suffixes accepted in configuration numbers.
SI_SUFFIXES = {
    "T": "e12",
    "G": "e9",
    "M": "e6",
    "k": "e3",
    "m": "e-3",
    "u": "e-6",
    "n": "e-9",
    "p": "e-12",
    "f": "e-15",
}


def hz_to_rad(freq):
    """Convert a frequency in Hz to an angular frequency in rad/s."""
    return TWOPI * freq


def rad_to_hz(omega):
    """Convert an angular frequency in rad/s to a frequency in Hz."""
    return omega / TWOPI


def task_rng(root_seed: int, *keys: int) -> np.random.Generator:
    """
    Return the random generator for one independent task.

    Streams are split from the root seed by ``SeedSequence`` spawn keys,
    so a task's draws depend only on ``(root_seed, keys)`` and never on
    the order in which tasks execute.

    Args:
        root_seed: The experiment's root seed.
        keys: Non-negative integers identifying the task (e.g. sweep point, chunk).

    Returns:
        A freshly seeded generator.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(int(k) for k in keys)))


def format_float(x: float) -> str:
    """Locale independent, round-trip exact text for a float."""
    return format(float(x), ".17g")


def write_atomic(path: Union[str, Path], text: str) -> Path:
    """
    Write a text file by way of a temporary file and a rename.

    Readers never observe a partially written file.

    Args:
        path: Destination file.
        text: Complete file contents.

    Returns:
        The destination path.
    """
    dest = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=dest.parent, prefix=f".{dest.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as tmp_file:
            tmp_file.write(text)
        os.replace(tmp_name, dest)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
    return dest


def table_csv(headers: list[str], rows) -> str:
    """
    Locale independent CSV text, with round-trip exact numbers.

    Args:
        headers: Column names, units included (e.g. ``tau_s``).
        rows: 2-D array, one row per record.
    """
    buf = StringIO()
    np.savetxt(buf, np.atleast_2d(rows), fmt="%.17g", delimiter=",", header=",".join(headers), comments="")
    return buf.getvalue()


def table_json(headers: list[str], rows, config=None, metadata=None, notes=()) -> str:
    "JSON document holding a table's columns, plus the configuration that produced it."
    rows = np.atleast_2d(rows)
    doc = {
        "config": config or {},
        "metadata": metadata or {},
        "notes": list(notes),
        "columns": {name: [float(x) for x in rows[:, k]] for k, name in enumerate(headers)},
    }
    return json.dumps(doc, indent=2) + "\n"
