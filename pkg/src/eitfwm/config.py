"""Experiment configuration files.

INI-style text, rates in units of Gamma and durations in microseconds::

    [params]
    omega_c = 0.32
    omega_d = 0.35
    delta = 13
    gamma21 = 0.0009
    gamma31 = 1.25
    gamma41 = 1.25
    alpha = 42

    [probe]
    shape = square
    peak_rabi = 0.001
    duration_us = 50
    edge_time_us = 0.5
    start_us = 2

    [driving]
    # peak taken from params.omega_d
    shape = square
    duration_us = 70
    edge_time_us = 0.5
    start_us = 2

    [grid]
    n_z = 200
    dt = 0.05
    # t_max_us = 120     (optional)

    # optional
    [sweep]
    variable = omega_d   # omega_d | delta | alpha
    values = 0.1, 0.2, 0.3
    # or: linspace = start, stop, count
    mode = pulsed        # pulsed | analytic

    # optional: repeat the sweep for each value
    [curves]
    variable = gamma21
    values = 2e-4, 9e-4, 1.6e-3

    [output]
    path = out.csv
    sample_us = 0.1

A ``[figure]`` section with ``id`` and ``caption`` is carried through to
output provenance.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .bloch import SystemParams
from .errors import ConfigurationError, DomainError
from .propagator import PropagationGrid, PulseSpec
from .units import gamma_time_to_us, us_to_gamma_time

__all__ = [
    "SWEEP_VARIABLES",
    "CURVE_VARIABLES",
    "Sweep",
    "Curves",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "config_hash",
]

SWEEP_VARIABLES = ("omega_d", "delta", "alpha")
CURVE_VARIABLES = ("gamma21", "gamma31", "omega_d", "delta", "alpha", "omega_c")
SWEEP_MODES = ("pulsed", "analytic")


def _fmt(value: float) -> str:
    return f"{float(value):.12g}"


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: tuple[float, ...]
    mode: str = "pulsed"
    linspace: tuple[float, float, int] | None = None

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigurationError(
                f"[sweep] variable must be one of {', '.join(SWEEP_VARIABLES)}, "
                f"got {self.variable!r}")
        if not self.values:
            raise ConfigurationError("[sweep] values must be non-empty")
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigurationError("[sweep] values must be finite")
        if self.mode not in SWEEP_MODES:
            raise ConfigurationError(f"[sweep] mode must be pulsed or analytic, got {self.mode!r}")


@dataclass(frozen=True)
class Curves:
    variable: str
    values: tuple[float, ...]
    linspace: tuple[float, float, int] | None = None

    def __post_init__(self):
        if self.variable not in CURVE_VARIABLES:
            raise ConfigurationError(f"[curves] variable must be one of {CURVE_VARIABLES}")
        if not self.values or not all(math.isfinite(v) for v in self.values):
            raise ConfigurationError("[curves] values must be finite and non-empty")


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams
    probe: PulseSpec
    driving: PulseSpec
    grid: PropagationGrid = PropagationGrid()
    sweep: Sweep | None = None
    curves: Curves | None = None
    output_path: str | None = None
    sample_us: float = 0.1
    figure: dict = field(default_factory=dict)

    @property
    def omega_d(self) -> float:
        return abs(complex(self.driving.peak_rabi))

    def with_value(self, variable: str, value: float) -> "ExperimentConfig":
        """Copy with one physical parameter replaced."""
        if variable == "omega_d":
            return replace(self, driving=replace(self.driving, peak_rabi=float(value)))
        if variable in ("delta", "alpha", "gamma21", "gamma31", "omega_c"):
            return replace(self, params=replace(self.params, **{variable: float(value)}))
        raise ConfigurationError(f"unknown parameter {variable!r}")


def _get_float(parser, section: str, key: str, default=None) -> float:
    if not parser.has_option(section, key):
        if default is None:
            raise ConfigurationError(f"[{section}] missing required key {key!r}")
        return default
    raw = parser.get(section, key)
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"[{section}] {key} = {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigurationError(f"[{section}] {key} must be finite")
    return value


def _float_list(raw: str, where: str) -> tuple[float, ...]:
    items = [x.strip() for x in raw.replace("\n", ",").split(",") if x.strip()]
    try:
        return tuple(float(x) for x in items)
    except ValueError:
        raise ConfigurationError(f"{where}: could not parse number list {raw!r}") from None


def _values(parser, section: str) -> tuple[tuple[float, ...], tuple | None]:
    if parser.has_option(section, "values"):
        return _float_list(parser.get(section, "values"), f"[{section}] values"), None
    if parser.has_option(section, "linspace"):
        spec = _float_list(parser.get(section, "linspace"), f"[{section}] linspace")
        if len(spec) != 3 or spec[2] < 1 or spec[2] != int(spec[2]):
            raise ConfigurationError(f"[{section}] linspace needs start, stop, count")
        lin = (spec[0], spec[1], int(spec[2]))
        return tuple(float(v) for v in np.linspace(*lin)), lin
    raise ConfigurationError(f"[{section}] needs 'values' or 'linspace'")


def _pulse(parser, section: str, peak: float | None) -> PulseSpec:
    if not parser.has_section(section):
        raise ConfigurationError(f"missing [{section}] section")
    shape = parser.get(section, "shape", fallback="square").strip()
    if peak is None:
        peak = _get_float(parser, section, "peak_rabi", 1e-3)
    try:
        return PulseSpec(
            shape=shape,
            peak_rabi=peak,
            duration=us_to_gamma_time(_get_float(parser, section, "duration_us")),
            edge_time=us_to_gamma_time(_get_float(parser, section, "edge_time_us", 0.5)),
            start_time=us_to_gamma_time(_get_float(parser, section, "start_us", 2.0)),
        )
    except ConfigurationError as exc:
        raise ConfigurationError(f"[{section}] {exc}") from None


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    if not parser.has_section("params"):
        raise ConfigurationError("missing [params] section")
    try:
        params = SystemParams(
            omega_c=_get_float(parser, "params", "omega_c"),
            delta=_get_float(parser, "params", "delta"),
            gamma21=_get_float(parser, "params", "gamma21", 0.0),
            gamma31=_get_float(parser, "params", "gamma31", 1.25),
            gamma41=_get_float(parser, "params", "gamma41", 1.25),
            alpha=_get_float(parser, "params", "alpha"),
        )
    except DomainError as exc:
        raise ConfigurationError(f"[params] {exc}") from None
    omega_d = _get_float(parser, "params", "omega_d")
    if omega_d < 0:
        raise ConfigurationError("[params] omega_d must be >= 0")
    probe = _pulse(parser, "probe", None)
    driving = _pulse(parser, "driving", omega_d)

    grid = PropagationGrid()
    if parser.has_section("grid"):
        n_z = _get_float(parser, "grid", "n_z", float(grid.n_z))
        if n_z != int(n_z):
            raise ConfigurationError("[grid] n_z must be an integer")
        t_max_us = _get_float(parser, "grid", "t_max_us", -1.0)
        grid = PropagationGrid(int(n_z), _get_float(parser, "grid", "dt", grid.dt),
                               us_to_gamma_time(t_max_us) if t_max_us > 0 else None)

    sweep = None
    if parser.has_section("sweep"):
        values, lin = _values(parser, "sweep")
        sweep = Sweep(parser.get("sweep", "variable", fallback="").strip(), values,
                      parser.get("sweep", "mode", fallback="pulsed").strip(), lin)
    curves = None
    if parser.has_section("curves"):
        values, lin = _values(parser, "curves")
        curves = Curves(parser.get("curves", "variable", fallback="").strip(), values, lin)

    output_path = None
    sample_us = 0.1
    if parser.has_section("output"):
        output_path = parser.get("output", "path", fallback=None)
        sample_us = _get_float(parser, "output", "sample_us", 0.1)
        if sample_us <= 0:
            raise ConfigurationError("[output] sample_us must be > 0")
    figure = dict(parser.items("figure")) if parser.has_section("figure") else {}
    return ExperimentConfig(params, probe, driving, grid, sweep, curves, output_path,
                            sample_us, figure)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def _values_entry(block) -> dict:
    if block.linspace is not None:
        start, stop, count = block.linspace
        return {"linspace": f"{_fmt(start)}, {_fmt(stop)}, {int(count)}"}
    return {"values": ", ".join(_fmt(v) for v in block.values)}


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config`` inverts it."""
    parser = configparser.ConfigParser(interpolation=None)
    if config.figure:
        parser["figure"] = dict(config.figure)
    p = config.params
    parser["params"] = {
        "omega_c": _fmt(p.omega_c), "omega_d": _fmt(config.omega_d), "delta": _fmt(p.delta),
        "gamma21": _fmt(p.gamma21), "gamma31": _fmt(p.gamma31), "gamma41": _fmt(p.gamma41),
        "alpha": _fmt(p.alpha),
    }
    for name, pulse in (("probe", config.probe), ("driving", config.driving)):
        section = {"shape": pulse.shape}
        if name == "probe":
            section["peak_rabi"] = _fmt(abs(complex(pulse.peak_rabi)))
        section.update({
            "duration_us": _fmt(gamma_time_to_us(pulse.duration)),
            "edge_time_us": _fmt(gamma_time_to_us(pulse.edge_time)),
            "start_us": _fmt(gamma_time_to_us(pulse.start_time)),
        })
        parser[name] = section
    grid = {"n_z": str(config.grid.n_z), "dt": _fmt(config.grid.dt)}
    if config.grid.t_max is not None:
        grid["t_max_us"] = _fmt(gamma_time_to_us(config.grid.t_max))
    parser["grid"] = grid
    if config.sweep is not None:
        parser["sweep"] = {"variable": config.sweep.variable,
                           **_values_entry(config.sweep), "mode": config.sweep.mode}
    if config.curves is not None:
        parser["curves"] = {"variable": config.curves.variable, **_values_entry(config.curves)}
    output = {"sample_us": _fmt(config.sample_us)}
    if config.output_path:
        output["path"] = config.output_path
    parser["output"] = output
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()[:16]
