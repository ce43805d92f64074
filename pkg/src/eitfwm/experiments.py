"""Single runs, parameter sweeps and bundled figure configurations."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import metadata, resources
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, config_hash, parse_config
from .csvio import format_header, format_number, write_envelope_csv
from .errors import ConfigurationError, EITFWMError
from .propagator import PropagationResult, propagate
from .steady import SteadyStateInputs, steady_state
from .units import gamma_time_to_us, us_to_gamma_time

__all__ = [
    "FIGURES",
    "SweepRecord",
    "provenance",
    "run_single",
    "run_sweep",
    "run_curves",
    "expand_curves",
    "write_sweep_csv",
    "bundled_config",
    "reproduce_figure",
]

log = logging.getLogger(__name__)

FIGURES = ("fig2", "fig3a", "fig3b", "fig4", "fig5")


@dataclass
class SweepRecord:
    swept_value: float
    probe_transmission: float
    signal_efficiency: float
    probe_delay: float  # 1/Gamma; nan in analytic mode
    metadata: dict = field(default_factory=dict)


def _versions() -> dict:
    out = {}
    for dist in ("eitfwm", "numpy", "scipy", "numba"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out


def provenance(config: ExperimentConfig, mode: str) -> dict:
    meta = {"config_hash": config_hash(config), "mode": mode}
    if config.figure:
        meta["figure"] = dict(config.figure)
    p = config.params
    meta["params"] = {"omega_c": p.omega_c, "omega_d": config.omega_d, "delta": p.delta,
                      "gamma21": p.gamma21, "gamma31": p.gamma31, "gamma41": p.gamma41,
                      "alpha": p.alpha}
    if mode == "pulsed":
        meta["grid"] = {"n_z": config.grid.n_z, "dt": config.grid.dt}
        meta["pulses"] = {
            "probe_duration_us": gamma_time_to_us(config.probe.duration),
            "driving_duration_us": gamma_time_to_us(config.driving.duration),
            "edge_time_us": gamma_time_to_us(config.probe.edge_time),
            "shape": config.probe.shape,
        }
        meta["efficiency_definition"] = "energy ratio"
    meta["versions"] = _versions()
    return meta


def _scaled(config: ExperimentConfig, grid_scale: float) -> ExperimentConfig:
    if grid_scale == 1.0:
        return config
    return replace(config, grid=config.grid.scaled(grid_scale))


def _propagate(config: ExperimentConfig) -> PropagationResult:
    return propagate(config.probe, None, config.driving, config.params, config.grid)


def run_single(config: ExperimentConfig, out_path=None, grid_scale: float = 1.0):
    """Propagate one configuration and write the envelope CSV.

    Returns ``(result, path)``; ``path`` is None when neither ``out_path``
    nor the config names an output file.
    """
    if config.sweep is not None:
        raise ConfigurationError("run_single needs a config without a [sweep] section")
    config = _scaled(config, grid_scale)
    result = _propagate(config)
    path = out_path or config.output_path
    if path:
        stride = max(1, int(round(us_to_gamma_time(config.sample_us) / config.grid.dt)))
        meta = provenance(config, "pulsed")
        meta["summary"] = {
            "conversion_efficiency": result.conversion_efficiency,
            "energy_transmission_probe": result.energy_transmission_probe,
            "probe_delay_us": gamma_time_to_us(result.probe_delay),
        }
        path = write_envelope_csv(result, path, meta, stride=stride)
    return result, path


def _sweep_point(args) -> SweepRecord:
    config, variable, value, mode = args
    point = config.with_value(variable, value)
    try:
        if mode == "analytic":
            p = point.params
            sol = steady_state(SteadyStateInputs(p.omega_c, point.omega_d, p.delta,
                                                 p.gamma31, p.alpha))
            return SweepRecord(float(value), sol.probe_transmission, sol.signal_efficiency,
                               float("nan"), {"mode": "analytic"})
        res = _propagate(point)
    except EITFWMError as exc:
        raise type(exc)(f"sweep point {variable}={value:g} failed: {exc}") from exc
    return SweepRecord(float(value), res.energy_transmission_probe, res.conversion_efficiency,
                       res.probe_delay,
                       {"mode": "pulsed", "n_z": point.grid.n_z, "dt": point.grid.dt,
                        "edge_time": point.probe.edge_time})


def run_sweep(config: ExperimentConfig, *, analytic: bool | None = None, serial: bool = False,
              grid_scale: float = 1.0, out_path=None) -> list[SweepRecord]:
    """Evaluate every sweep value; records come back in input order.

    ``analytic`` overrides the config's sweep mode when given.  Pulsed
    points run in worker processes unless ``serial`` is set or only one CPU
    is available.
    """
    if config.sweep is None:
        raise ConfigurationError("config has no [sweep] section")
    config = _scaled(config, grid_scale)
    mode = config.sweep.mode if analytic is None else ("analytic" if analytic else "pulsed")
    tasks = [(config, config.sweep.variable, v, mode) for v in config.sweep.values]
    workers = os.cpu_count() or 1
    if serial or mode == "analytic" or workers < 2 or len(tasks) < 2:
        records = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
            records = list(pool.map(_sweep_point, tasks))
    path = out_path or config.output_path
    if path:
        write_sweep_csv(records, path, config, mode)
    return records


def write_sweep_csv(records, path, config: ExperimentConfig, mode: str) -> Path:
    lines = format_header(provenance(config, mode))
    lines.append(f"{config.sweep.variable},probe_transmission,signal_efficiency,probe_delay_us")
    for rec in records:
        delay = gamma_time_to_us(rec.probe_delay) if math.isfinite(rec.probe_delay) else math.nan
        lines.append(",".join(format_number(v) for v in (
            rec.swept_value, rec.probe_transmission, rec.signal_efficiency, delay)))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def expand_curves(config: ExperimentConfig) -> list[tuple[str, ExperimentConfig]]:
    """One (label, config) per ``[curves]`` value, or the config itself."""
    if config.curves is None:
        return [("", config)]
    out = []
    for value in config.curves.values:
        sub = replace(config.with_value(config.curves.variable, value), curves=None)
        out.append((f"{config.curves.variable}={format_number(value)}", sub))
    return out


def _curve_path(base: Path, label: str) -> Path:
    if not label:
        return base
    tag = label.replace("=", "_").replace("+", "")
    return base.with_name(f"{base.stem}_{tag}{base.suffix}")


def run_curves(config: ExperimentConfig, out_path, **kwargs) -> list[tuple[str, list[SweepRecord], Path]]:
    base = Path(out_path or config.output_path or "sweep.csv")
    out = []
    for label, sub in expand_curves(config):
        path = _curve_path(base, label)
        if label:
            sub = replace(sub, figure={**sub.figure, "curve": label})
        records = run_sweep(sub, out_path=path, **kwargs)
        out.append((label, records, path))
    return out


def bundled_config(figure_id: str) -> ExperimentConfig:
    if figure_id not in FIGURES:
        raise ConfigurationError(
            f"unknown figure id {figure_id!r}; choose one of {', '.join(FIGURES)}")
    text = resources.files("eitfwm").joinpath("configs", f"{figure_id}.ini").read_text("utf-8")
    return parse_config(text)


def reproduce_figure(figure_id: str, out_dir=".", *, grid_scale: float = 1.0,
                     serial: bool = False) -> list[Path]:
    """Run the bundled configuration of one figure and write its CSV files."""
    config = bundled_config(figure_id)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.sweep is None:
        _, path = run_single(config, out_dir / f"{figure_id}.csv", grid_scale)
        return [path]
    runs = run_curves(config, out_dir / f"{figure_id}.csv", serial=serial, grid_scale=grid_scale)
    return [path for _, _, path in runs]


def sweep_table(records: list[SweepRecord]) -> np.ndarray:
    return np.array([[r.swept_value, r.probe_transmission, r.signal_efficiency, r.probe_delay]
                     for r in records])
