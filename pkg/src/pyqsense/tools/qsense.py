#! /usr/bin/env python

"""Command line front end for simulating single-qubit quantum sensors.

Original Author: David Banas
Original Date:   October 18, 2026

Copyright (c) 2026 David Banas; All rights reserved World wide.

Every verb writes plot-ready CSV and/or JSON into ``--out``. Each JSON
document carries the complete, resolved configuration (sequence and noise
text inlined) that produced it, so that ``qsense replay RESULT.json``
reproduces its CSV byte for byte.

Options may also come from a ``.run`` file (``--config``), holding
``(run (KEY VALUE) ...)`` entries keyed like the long options; options
given on the command line win.
"""

import json
import os
import re
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Optional

import click
import em
import numpy as np

from pyqsense.analysis.sensitivity import (
    SENSOR_PRESETS,
    SensorSpec,
    field_precision,
    implied_readout_penalty,
    sensitivity_ac,
    sensitivity_dc,
)
from pyqsense.analysis.spectral import (
    model_spectrum,
    predict_coherence,
    reconstruct_spectrum,
)
from pyqsense.common import TWOPI, table_csv, table_json, task_rng, write_atomic
from pyqsense.config import (
    SWEEP_UNITS,
    ConfigError,
    SweepSpec,
    parse_assignments,
    parse_number,
    parse_run_config,
    parse_sweep,
)
from pyqsense.engine.experiment import (
    coherence_decay_curve,
    estimate_detuning,
    mean_populations,
    operating_offset,
    run_experiment,
)
from pyqsense.engine.odmr import odmr_scan
from pyqsense.engine.readout import ReadoutConfig, simulate_readout
from pyqsense.noise.model import NoiseModelError, SignalModel, with_offset
from pyqsense.noise.config import parse_noise_config
from pyqsense.sequence.model import BUILDERS, PulseSequence, SequenceFamily, ramsey
from pyqsense.sequence.parser import format_sequence, parse_sequence

TEMPLATE_DIR = Path(__file__).parent
SENSE_REPORT_TEMPLATE = "sense_report.md.em"

# Averaging times tabulated by ``sense``, in seconds.
PRECISION_TIMES = tuple(10.0**k for k in range(-3, 4))

# Values used for options neither given on the command line nor in a ``.run`` file.
DEFAULTS: dict[str, Any] = {
    "builder": [],
    "param": [],
    "reps": 1000,
    "sensors": 1,
    "m0": 1.0,
    "contrast": 1.0,
    "seed": 0,
    "out": ".",
    "format": "both",
    "realizations": 1000,
    "workers": 1,
    "detuning": "0",
    "decay": "simulated",
    "iterations": 20,
    "preset": "single_nv",
    "field": "1u",
    "trials": 1,
    "t_total": "1",
    "linewidth": "1M",
}

COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "fringes": {"builder": ["ramsey"]},
    "decay": {"builder": ["ramsey", "hahn", "cpmg8"]},
    "spectrum": {"builder": ["cpmg8"], "decay": "analytic"},
    "odmr": {"contrast": 0.3},
}

# Options naming files, whose contents travel with the resolved configuration.
INLINED = {"seq": "seq_text", "noise": "noise_text"}


#####
# Run configuration
#####


@dataclass
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """
    A fully resolved, validated command.

    ``options`` is the JSON-ready record of every setting used; feeding it back
    through ``build_config()`` rebuilds an identical ``RunConfig``.
    """

    command: str
    options: dict[str, Any]
    out: Path
    formats: tuple[str, ...]
    readout: ReadoutConfig
    sequence: Optional[PulseSequence] = None
    families: tuple[SequenceFamily, ...] = ()
    model: Optional[SignalModel] = None
    sweep: Optional[SweepSpec] = None

    @property
    def source(self):
        "The single sequence source: a fixed sequence, or a builder family."
        if self.sequence is not None:
            return self.sequence
        if len(self.families) != 1:
            raise ConfigError(f"'{self.command}' takes a single sequence builder; got {len(self.families)}.")
        return self.families[0]

    def resolved(self) -> dict[str, Any]:
        "The configuration, as embedded in result JSON."
        return {"command": self.command, **self.options}

    def number(self, key: str) -> float:
        "An option holding a number, possibly with an SI suffix."
        return as_number(self.options[key], key)


def as_number(value: Any, name: str = "value") -> float:
    "Numbers pass through; text is parsed, SI suffixes allowed."
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    try:
        return parse_number(str(value))
    except ConfigError as err:
        raise ConfigError(f"Option '{name}': {err}") from err


def as_int(value: Any, name: str) -> int:
    "A whole number option."
    x = as_number(value, name)
    if x != int(x):
        raise ConfigError(f"Option '{name}' must be a whole number; got {value}.")
    return int(x)


def merge_options(command: str, kwargs: dict[str, Any]) -> dict[str, Any]:
    """
    Combine command line options, a ``.run`` file, and the defaults, in that order of precedence.

    An option counts as given on the command line when it isn't ``None`` (or empty, for
    repeatable options).

    Raises:
        ConfigError: Unreadable ``.run`` file, a file for another command, or an unknown key.
    """
    options = {k: v for k, v in kwargs.items() if k != "config"}
    given = {k for k, v in options.items() if v is not None and v != () and v != []}
    path = kwargs.get("config")
    if path:
        try:
            file_opts = parse_run_config(Path(path).read_text(encoding="utf-8"))
        except OSError as err:
            raise ConfigError(f"Can't read run configuration '{path}': {err.strerror}.") from err
        except ConfigError as err:
            raise ConfigError(f"{path}: {err}") from err
        file_command = file_opts.pop("command", command)
        if file_command != command:
            raise ConfigError(f"{path} configures '{file_command}', not '{command}'.")
        for key, value in file_opts.items():
            key = key.replace("-", "_")
            if key not in options:
                raise ConfigError(f"{path}: '{command}' has no option '{key}'.")
            if key not in given:
                options[key] = value
                given.add(key)
    defaults = dict(DEFAULTS)
    defaults.update(COMMAND_DEFAULTS.get(command, {}))
    if "seq" in given:
        defaults["builder"] = []
    for key in options:
        if key not in given and key in defaults:
            options[key] = defaults[key]
    for key, value in options.items():
        if isinstance(value, tuple):
            options[key] = list(value)
    return options


def family_from_token(token: str, params: dict[str, float], strict: bool = True) -> SequenceFamily:
    """
    A builder family from its name, optionally suffixed with a pulse count (e.g. ``cpmg8``).

    Keyword Args:
        strict: Pass every parameter along (Default = True); otherwise, drop those the builder doesn't take.
    """
    name, count = token, None
    m = re.fullmatch(r"([a-z]+?)(\d+)", token)
    if token not in BUILDERS and m and m.group(1) in BUILDERS:
        name, count = m.group(1), int(m.group(2))
    values = dict(params)
    if count is not None:
        values["n"] = count
    if name not in BUILDERS:
        raise ConfigError(f"Unknown sequence builder: '{token}'; expected one of {list(BUILDERS)}.")
    family = SequenceFamily(name)
    if not strict:
        values = {k: v for k, v in values.items() if k in family.parameter_names or k in ("T", "tau")}
    if "n" in values:
        values["n"] = as_int(values["n"], "n")
    return SequenceFamily(name, values)


def _read_text(options: dict[str, Any], key: str) -> Optional[str]:
    "Contents of a file option, from its inlined text when present."
    inline = INLINED[key]
    if options.get(inline) is not None:
        return options[inline]
    path = options.get(key)
    if not path:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"Can't read {key} file '{path}': {err.strerror or err}.") from err
    options[inline] = text
    return text


def check_out_dir(out: Path) -> None:
    """
    Make sure results can be written into ``out``, creating it if needed.

    Raises:
        ConfigError: ``out`` is a file, or isn't writable.
    """
    if out.exists() and not out.is_dir():
        raise ConfigError(f"Output path '{out}' is not a directory.")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as err:
        raise ConfigError(f"Can't create output directory '{out}': {err.strerror or err}.") from err
    if not os.access(out, os.W_OK | os.X_OK):
        raise ConfigError(f"Output directory '{out}' is not writable.")


def build_config(command: str, options: dict[str, Any]) -> RunConfig:
    """
    Validate merged options and resolve them into a ``RunConfig``.

    Raises:
        ConfigError: Any invalid setting; nothing has been computed or written yet.
    """
    options = dict(options)
    params = parse_assignments(options.get("param") or [])
    sequence = None
    families: tuple[SequenceFamily, ...] = ()
    if "seq" in options:
        seq_text = _read_text(options, "seq")
        builders = options.get("builder") or []
        if seq_text is not None:
            if builders:
                raise ConfigError("Give either a sequence file or builders, not both.")
            name = Path(options["seq"]).stem if options.get("seq") else "custom"
            try:
                sequence = parse_sequence(seq_text, name=name)
            except ValueError as err:
                raise ConfigError(f"Sequence '{options.get('seq') or name}': {err}") from err
        else:
            strict = len(builders) == 1
            try:
                families = tuple(family_from_token(str(b), params, strict) for b in builders)
            except ValueError as err:
                raise ConfigError(str(err)) from err
            if not families and command != "validate":
                raise ConfigError(f"'{command}' needs a sequence: give --seq or --builder.")

    model = None
    if "noise" in options:
        noise_text = _read_text(options, "noise")
        if noise_text is not None:
            try:
                model = parse_noise_config(noise_text)
            except NoiseModelError as err:
                raise ConfigError(f"Noise '{options.get('noise') or 'inline'}': {err}") from err
    if "detuning" in options:
        offset = TWOPI * as_number(options["detuning"], "detuning")
        if offset != 0:
            model = with_offset(model, offset)

    readout = ReadoutConfig(
        reps=as_int(options.get("reps", 1), "reps"),
        sensors=as_int(options.get("sensors", 1), "sensors"),
        m0=as_number(options.get("m0", 1.0), "m0"),
        contrast=as_number(options.get("contrast", 1.0), "contrast") if command != "odmr" else 1.0,
        seed=as_int(options.get("seed", 0), "seed"),
    )

    sweep = None
    if options.get("sweep") is not None:
        sweep = parse_sweep(str(options["sweep"]))
    elif "sweep" in options and command != "validate":
        raise ConfigError(f"'{command}' needs a sweep: give --sweep (e.g. tau=0.1us:2us:200).")

    formats = ()
    if "format" in options:
        fmt = options["format"]
        if fmt not in ("csv", "json", "both"):
            raise ConfigError(f"Unknown format '{fmt}'; expected csv, json or both.")
        formats = ("csv", "json") if fmt == "both" else (fmt,)

    for key in ("realizations", "workers", "iterations", "trials"):
        if key in options and as_int(options[key], key) < (0 if key == "iterations" else 1):
            raise ConfigError(f"Option '{key}' is out of range: {options[key]}.")
    if "decay" in options and options["decay"] not in ("analytic", "simulated"):
        raise ConfigError(f"Unknown decay mode '{options['decay']}'; expected analytic or simulated.")
    if "preset" in options and options["preset"] not in SENSOR_PRESETS:
        raise ConfigError(f"Unknown sensor preset '{options['preset']}'; expected one of {list(SENSOR_PRESETS)}.")

    out = Path(options.get("out") or ".")
    if command != "validate":
        check_out_dir(out)
    return RunConfig(command, options, out, formats, readout, sequence, families, model, sweep)


#####
# Output
#####


def render_template(name: str, **env) -> str:
    """
    Expand an EmPy template from this directory, by way of a temporary file.

    Args:
        name: Template file name.

    Keyword Args:
        All are made available to the template as globals.

    Returns:
        The expanded text.
    """
    fd, tmp_name = tempfile.mkstemp(prefix="qsense_", suffix=".tmp")
    os.close(fd)
    try:
        with open(tmp_name, "wt", encoding="utf-8") as out_file:
            interpreter = em.Interpreter(output=out_file, globals=dict(env))
            try:
                with open(TEMPLATE_DIR / name, "rt", encoding="utf-8") as in_file:
                    interpreter.file(in_file)
            finally:
                interpreter.shutdown()
        return Path(tmp_name).read_text(encoding="utf-8")
    finally:
        os.remove(tmp_name)


def table_outputs(cfg: RunConfig, stem: str, headers: list[str], rows, metadata=None, notes=()) -> dict[Path, str]:
    "File contents for one table, in the requested formats."
    outputs = {}
    if "csv" in cfg.formats:
        outputs[cfg.out / f"{stem}.csv"] = table_csv(headers, rows)
    if "json" in cfg.formats:
        outputs[cfg.out / f"{stem}.json"] = table_json(
            headers, rows, config=cfg.resolved(), metadata=metadata, notes=notes
        )
    return outputs


def write_outputs(outputs: dict[Path, str]) -> list[Path]:
    "Write fully rendered files, each atomically."
    return [write_atomic(path, text) for path, text in outputs.items()]


def write_table(cfg: RunConfig, stem: str, headers: list[str], rows, metadata=None, notes=()) -> list[Path]:
    "Write one table in the requested formats."
    return write_outputs(table_outputs(cfg, stem, headers, rows, metadata, notes))


def _column(variable: str) -> str:
    unit = SWEEP_UNITS.get(variable, "")
    return f"{variable}_{unit}" if unit else variable


#####
# Commands
#####


def cmd_fringes(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    "Fringe sweep (time or detuning domain) with projection-noise readout."
    result = run_experiment(
        cfg.source,
        cfg.model,
        cfg.sweep,
        cfg.readout,
        realizations=as_int(cfg.options["realizations"], "realizations"),
        workers=as_int(cfg.options["workers"], "workers"),
    )
    headers, rows = result.table()
    return write_table(cfg, "fringes", headers, rows, result.metadata, result.notes), list(result.notes)


def cmd_decay(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    "Coherence decay curves, one per builder family, on a shared grid."
    if cfg.sequence is not None:
        raise ConfigError("'decay' sweeps sequence builders; a fixed sequence file can't be swept.")
    if cfg.sweep.variable not in ("tau", "T", "n"):
        raise ConfigError(f"'decay' sweeps tau, T or n; got '{cfg.sweep.variable}'.")
    curves = [
        coherence_decay_curve(
            family,
            cfg.sweep.values,
            cfg.model,
            variable=cfg.sweep.variable,
            realizations=as_int(cfg.options["realizations"], "realizations"),
            seed=cfg.readout.seed,
            workers=as_int(cfg.options["workers"], "workers"),
            analytic=cfg.options["decay"] == "analytic",
        )
        for family in cfg.families
    ]
    headers = [_column(cfg.sweep.variable)]
    columns = [np.asarray(cfg.sweep.values)]
    notes: list[str] = []
    decay_times = {}
    for curve in curves:
        headers += [f"T_s_{curve.label}", f"C_{curve.label}"]
        columns += [curve.total_times, curve.coherence]
        decay_times[curve.label] = curve.fit_decay_time()
        notes += [f"{curve.label}: {note}" for note in curve.notes]
    metadata = {"decay_time_s": decay_times, "families": [c.label for c in curves]}
    files = write_table(cfg, "decay", headers, np.column_stack(columns), metadata, notes)
    notes += [f"1/e decay time, {label}: {t:.6g} s" for label, t in decay_times.items()]
    return files, notes


def cmd_spectrum(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    "Reconstruct the detuning spectrum from a CPMG decay, with the model's own spectrum alongside."
    family = cfg.source
    if not isinstance(family, SequenceFamily) or family.builder not in ("cpmg", "hahn"):
        raise ConfigError("'spectrum' reconstructs from CPMG decays: use --builder cpmg --param n=N (or cpmgN).")
    if cfg.sweep.variable != "tau":
        raise ConfigError(f"'spectrum' sweeps the pulse spacing tau; got '{cfg.sweep.variable}'.")
    n = int(family.params.get("n", 1))
    curve = coherence_decay_curve(
        family,
        cfg.sweep.values,
        cfg.model,
        realizations=as_int(cfg.options["realizations"], "realizations"),
        seed=cfg.readout.seed,
        workers=as_int(cfg.options["workers"], "workers"),
        analytic=cfg.options["decay"] == "analytic",
    )
    estimate = reconstruct_spectrum(
        curve.values, curve.coherence, n, iterations=as_int(cfg.options["iterations"], "iterations")
    )
    headers, rows = estimate.table()
    notes = list(curve.notes) + list(estimate.notes)
    try:
        overlay = model_spectrum(cfg.model, estimate.frequencies)
        headers = headers + ["S_model_rad2_per_s2_per_hz"]
        rows = np.column_stack([rows, overlay]) if len(estimate.frequencies) else np.zeros((0, len(headers)))
    except NoiseModelError as err:
        notes.append(f"No analytic overlay: {err}")
    metadata = {"pulses": n, "decay": cfg.options["decay"]}
    return write_table(cfg, "spectrum", headers, rows, metadata, notes), notes


def sensor_spec(cfg: RunConfig) -> SensorSpec:
    "The preset's sensor constants, with any overrides."
    spec = SENSOR_PRESETS[cfg.options["preset"]].spec
    overrides = {}
    for key in ("t2_star", "t2", "t1"):
        if cfg.options.get(key) is not None:
            overrides[key] = cfg.number(key)
    if cfg.options.get("n_sensors") is not None:
        overrides["n_sensors"] = cfg.number("n_sensors")
    return replace(spec, **overrides) if overrides else spec


def cmd_sense(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    """
    End-to-end field estimation at the Ramsey slope, and the sensitivity report.

    Each trial reads out the same noise-averaged population with its own
    readout stream, ``task_rng(seed, trial, 0)``.
    """
    spec = sensor_spec(cfg)
    field = cfg.number("field")
    tau = cfg.number("tau") if cfg.options.get("tau") is not None else spec.t2_star / np.sqrt(2.0)
    t_total = cfg.number("t_total")
    trials = as_int(cfg.options["trials"], "trials")
    seq = ramsey(tau)
    offset = operating_offset(tau)
    noise = cfg.model
    envelope = 1.0
    notes: list[str] = []
    if noise is not None:
        envelope = predict_coherence(seq, noise)
        if not envelope > 0:
            raise ConfigError(f"The noise leaves no fringe contrast at tau = {tau:.6g} s.")
    p_true = mean_populations(
        [(seq, with_offset(noise, spec.gamma * field + offset))],
        as_int(cfg.options["realizations"], "realizations"),
        cfg.readout.seed,
        as_int(cfg.options["workers"], "workers"),
    )[0]
    rows = []
    for k in range(trials):
        p_hat, stderr = simulate_readout(p_true, cfg.readout, task_rng(cfg.readout.seed, k, 0))
        est = estimate_detuning(float(p_hat), tau, offset, float(stderr), envelope)
        b_hat, sigma_b = est.field(spec.gamma)
        rows.append([k, b_hat, sigma_b, float(abs(b_hat - field) <= 3.0 * sigma_b)])
        if k == 0:
            notes += list(est.notes)
    rows = np.array(rows)
    coverage = float(np.mean(rows[:, 3]))

    dc = sensitivity_dc(spec, cfg.readout, t_total)
    ac = sensitivity_ac(spec, cfg.readout, t_total)
    notes += list(dc.notes)
    penalty_dc, penalty_ac = implied_readout_penalty(cfg.options["preset"])
    precision = np.column_stack([PRECISION_TIMES, field_precision(dc.eta, PRECISION_TIMES)])
    metadata = {
        "field_T": field,
        "tau_s": tau,
        "offset_rad_per_s": offset,
        "envelope": envelope,
        "p_true": float(p_true),
        "coverage_3sigma": coverage,
        "spec": spec.as_dict(),
        "dc": dc.as_dict(),
        "ac": ac.as_dict(),
        "precision": {"t_total_s": list(PRECISION_TIMES), "sigma_b_T": [float(x) for x in precision[:, 1]]},
    }
    outputs = table_outputs(cfg, "sense", ["trial", "B_hat_T", "sigma_B_T", "within_3sigma"], rows, metadata, notes)
    if "csv" in cfg.formats:
        outputs[cfg.out / "sense_precision.csv"] = table_csv(["t_total_s", "sigma_B_T"], precision)
    outputs[cfg.out / "sense_report.md"] = render_template(
        SENSE_REPORT_TEMPLATE,
        preset=cfg.options["preset"],
        preset_info=SENSOR_PRESETS[cfg.options["preset"]],
        spec=spec,
        readout=cfg.readout,
        dc=dc,
        ac=ac,
        field=field,
        tau=tau,
        envelope=envelope,
        estimates=rows,
        coverage=coverage,
        precision=precision,
        penalties=(penalty_dc, penalty_ac),
        notes=notes,
    )
    # Nothing is written until every output has rendered.
    return write_outputs(outputs), notes


def cmd_odmr(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    "Fluorescence versus drive frequency."
    if cfg.sweep.variable != "freq":
        raise ConfigError(f"'odmr' sweeps the drive frequency, freq=...; got '{cfg.sweep.variable}'.")
    spec = sensor_spec(cfg)
    contrast = cfg.number("contrast")
    linewidth = TWOPI * cfg.number("linewidth")
    try:
        scan = odmr_scan(np.array(cfg.sweep.values), cfg.number("field"), spec, linewidth, contrast)
    except ValueError as err:
        raise ConfigError(str(err)) from err
    headers, rows = scan.table()
    metadata = {"resonance_rad_per_s": scan.resonance, "linewidth_rad_per_s": scan.linewidth, "contrast": contrast}
    return write_table(cfg, "odmr", headers, rows, metadata), [f"Dip at {scan.dip / TWOPI:.9g} Hz."]


def cmd_validate(cfg: RunConfig) -> tuple[list[Path], list[str]]:
    "Check a sequence (and any noise model); nothing is written."
    notes = []
    seqs = [cfg.sequence] if cfg.sequence is not None else []
    for family in cfg.families:
        try:
            seqs.append(family.build())
        except ValueError as err:
            notes.append(f"{family.label}: needs more parameters to build ({err}).")
    for seq in seqs:
        seq.check_brackets()
        notes.append(
            f"{seq.name}: {len(seq)} events, {len(seq.pi_times)} pi pulse(s), T = {seq.total_time:.6g} s, "
            + ("phase matched." if seq.is_phase_matched() else "NOT phase matched: zero phase doesn't end in |1>.")
        )
        if cfg.options.get("verbose"):
            notes.append(format_sequence(seq).rstrip())
    if cfg.model is not None:
        notes.append(f"Noise model: {type(cfg.model).__name__}.")
    if cfg.sweep is not None:
        notes.append(f"Sweep: {len(cfg.sweep)} point(s) of '{cfg.sweep.variable}'.")
    return [], notes


COMMANDS: dict[str, Callable[[RunConfig], tuple[list[Path], list[str]]]] = {
    "fringes": cmd_fringes,
    "decay": cmd_decay,
    "spectrum": cmd_spectrum,
    "sense": cmd_sense,
    "odmr": cmd_odmr,
    "validate": cmd_validate,
}


def execute(command: str, options: dict[str, Any]) -> list[Path]:
    """
    Build the run configuration from resolved options, run the command, and report.

    ``validate`` prints its findings to stdout; every other command's notes go to stderr.

    Raises:
        click.ClickException: Any configuration or computation error.
    """
    try:
        cfg = build_config(command, options)
        files, notes = COMMANDS[command](cfg)
    except (ValueError, OSError) as err:
        raise click.ClickException(str(err)) from err
    for note in notes:
        if command == "validate":
            click.echo(note)
        else:
            click.echo(f"Note: {note}", err=True)
    for path in files:
        click.echo(f"Wrote: {path}")
    return files


def run_command(command: str, **kwargs) -> list[Path]:
    """
    Provide a thin wrapper around the click interface so that we can test the operation.

    Raises:
        click.ClickException: Any configuration or computation error.
    """
    try:
        options = merge_options(command, kwargs)
    except ValueError as err:
        raise click.ClickException(str(err)) from err
    return execute(command, options)


def run_replay(result: str, out: Optional[str] = None, fmt: Optional[str] = None) -> list[Path]:
    """
    Re-execute the configuration embedded in a result JSON document.

    Raises:
        click.ClickException: Not a result document.
    """
    try:
        with open(result, "rt", encoding="utf-8") as result_file:
            config = dict(json.load(result_file)["config"])
        command = config.pop("command")
    except (OSError, ValueError, KeyError, TypeError) as err:
        raise click.ClickException(f"'{result}' is not a PyQSense result document: {err}") from err
    if command not in COMMANDS:
        raise click.ClickException(f"'{result}' holds an unknown command, '{command}'.")
    if out is not None:
        config["out"] = out
    if fmt is not None:
        config["format"] = fmt
    return execute(command, config)


#####
# Click interface
#####

_HUMAN = "Human units accepted, e.g. 1MHz, 5us."


def sequence_options(func):
    "--seq | --builder/--param"
    func = click.option(
        "--param",
        "-p",
        multiple=True,
        help="Builder parameter, NAME=VALUE (e.g. n=8, tau=1us); repeatable.",
    )(func)
    func = click.option(
        "--builder",
        "-b",
        multiple=True,
        help=f"Sequence builder: {', '.join(BUILDERS)}; a pulse count may be appended (cpmg8). Repeatable.",
    )(func)
    func = click.option(
        "--seq", "-s", type=click.Path(exists=True, dir_okay=False), help="Pulse sequence file (.seq)."
    )(func)
    return func


def readout_options(func):
    "--reps/--sensors/--m0/--contrast/--seed"
    func = click.option("--seed", type=int, help="Root random seed. [default: 0]")(func)
    func = click.option("--contrast", "-c", type=float, help="Readout contrast, in (0, 1]. [default: 1]")(func)
    func = click.option("--m0", type=float, help="Repetitions per effective single-shot readout. [default: 1]")(func)
    func = click.option("--sensors", "-N", type=int, help="Parallel sensors. [default: 1]")(func)
    func = click.option("--reps", "-M", type=int, help="Repetitions per point. [default: 1000]")(func)
    return func


def output_options(func):
    "--out/--format/--config"
    func = click.option(
        "--config", type=click.Path(exists=True, dir_okay=False), help="Run configuration file (.run)."
    )(func)
    func = click.option(
        "--format", "fmt", type=click.Choice(["csv", "json", "both"]), help="Output format(s). [default: both]"
    )(func)
    func = click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory. [default: .]")(func)
    return func


def engine_options(func):
    "--noise/--detuning/--realizations/--workers"
    func = click.option("--workers", "-w", type=int, help="Worker processes for Monte-Carlo. [default: 1]")(func)
    func = click.option(
        "--realizations", "-R", type=int, help="Noise realizations averaged per point. [default: 1000]"
    )(func)
    func = click.option("--detuning", "-d", help=f"Fixed detuning added to the noise (Hz). {_HUMAN} [default: 0]")(func)
    func = click.option(
        "--noise", "-n", type=click.Path(exists=True, dir_okay=False), help="Noise model file (.noise)."
    )(func)
    return func


def _invoke(command: str, kwargs: dict[str, Any]) -> None:
    kwargs["format"] = kwargs.pop("fmt", None)
    run_command(command, **kwargs)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="PyQSense")
def main():
    """Simulate single-qubit quantum sensors: Ramsey fringes, coherence decay,
    noise spectroscopy, field estimation and ODMR.

    Each command writes plot-ready CSV/JSON into --out.
    """


@main.command()
@sequence_options
@engine_options
@click.option("--sweep", "-x", help="Sweep: tau=0.1us:2us:200, T=..., n=1,2,4 or detuning=-1MHz:1MHz:101.")
@readout_options
@output_options
def fringes(**kwargs):
    """Fringe sweep of one sequence, with projection-noise readout.

    \b
    Example:
        qsense fringes -b ramsey -d 1MHz -x tau=0.01us:4us:200 -o out
    """
    _invoke("fringes", kwargs)


@main.command()
@sequence_options
@engine_options
@click.option("--sweep", "-x", help="Sweep over tau, T or n, shared by all builders.")
@click.option(
    "--decay", type=click.Choice(["analytic", "simulated"]), help="Filter-function or Monte-Carlo. [default: simulated]"
)
@click.option("--seed", type=int, help="Root random seed. [default: 0]")
@output_options
def decay(**kwargs):
    """Coherence decay, C = 2<p> - 1, for one or more builders.

    \b
    Example:
        qsense decay -b ramsey -b hahn -b cpmg8 -n ou.noise -x tau=1us:100us:40:log
    """
    _invoke("decay", kwargs)


@main.command()
@sequence_options
@engine_options
@click.option("--sweep", "-x", help="Pulse spacing sweep, tau=...")
@click.option(
    "--decay", type=click.Choice(["analytic", "simulated"]), help="Filter-function or Monte-Carlo. [default: analytic]"
)
@click.option("--iterations", "-i", type=int, help="Self-consistent refinement passes. [default: 20]")
@click.option("--seed", type=int, help="Root random seed. [default: 0]")
@output_options
def spectrum(**kwargs):
    """Reconstruct the detuning spectrum from a CPMG coherence decay.

    \b
    Example:
        qsense spectrum -b cpmg8 -n ou.noise -x tau=0.5us:50us:30:log
    """
    _invoke("spectrum", kwargs)


def sensor_options(func):
    "--preset and sensor constant overrides"
    for name, text in (
        ("--n-sensors", "Sensor count override."),
        ("--t1", "T1 override (s)."),
        ("--t2", "T2 override (s)."),
        ("--t2-star", "T2* override (s)."),
    ):
        func = click.option(name, help=text)(func)
    func = click.option(
        "--preset",
        type=click.Choice(list(SENSOR_PRESETS)),
        help="Sensor constants. [default: single_nv]",
    )(func)
    return func


@main.command()
@sensor_options
@click.option("--noise", "-n", type=click.Path(exists=True, dir_okay=False), help="Noise model file (.noise).")
@click.option("--field", "-B", help="True field (T); SI prefixes allowed, e.g. 1u. [default: 1u]")
@click.option("--tau", help="Interrogation time (s). [default: T2*/sqrt(2)]")
@click.option("--trials", "-K", type=int, help="Independent readout trials. [default: 1]")
@click.option("--t-total", help="Averaging time for the sensitivity report (s). [default: 1]")
@click.option("--realizations", "-R", type=int, help="Noise realizations averaged. [default: 1000]")
@click.option("--workers", "-w", type=int, help="Worker processes for Monte-Carlo. [default: 1]")
@readout_options
@output_options
def sense(**kwargs):
    """Estimate a known field at the Ramsey slope, and report the sensitivity.

    \b
    Example:
        qsense sense --preset single_nv -B 1u -K 1000 -o out
    """
    _invoke("sense", kwargs)


@main.command()
@sensor_options
@click.option("--sweep", "-x", help="Drive frequency sweep (Hz), freq=2.8GHz:2.95GHz:301.")
@click.option("--field", "-B", help="Field (T). [default: 1u]")
@click.option("--linewidth", help="Half width at half depth (Hz). [default: 1M]")
@click.option("--contrast", "-c", type=float, help="Dip depth, in [0, 1]. [default: 0.3]")
@output_options
def odmr(**kwargs):
    """Optically detected magnetic resonance scan."""
    _invoke("odmr", kwargs)


@main.command()
@sequence_options
@click.option("--noise", "-n", type=click.Path(exists=True, dir_okay=False), help="Noise model file (.noise).")
@click.option("--sweep", "-x", help="Sweep specification to check.")
@click.option("--verbose", "-v", is_flag=True, default=None, help="Echo the sequence text.")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), help="Run configuration file (.run).")
def validate(**kwargs):
    """Check a sequence, noise model or sweep, reporting whether the sequence is phase matched."""
    run_command("validate", **kwargs)


@main.command()
@click.argument("result", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Output directory. [default: as recorded]")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "both"]), help="Output format(s).")
def replay(result, out, fmt):
    """Re-run the configuration embedded in a RESULT json file."""
    run_replay(result, out, fmt)


if __name__ == "__main__":
    main()  # pylint: disable=no-value-for-parameter
