"""Pulsed propagation of probe and signal envelopes through the FWM medium.

The field equations are integrated in the retarded-time frame, where the
1/c time derivative drops out:

    d Op/dz = i (alpha g31 / 2) rho31,    d Os/dz = i (alpha g41 / 2) rho41

with z normalized to the medium length.  Each z slice is advanced as a
whole time series by :mod:`eitfwm.bloch`; the march in z uses the explicit
midpoint rule (second order), so each slice costs two Bloch integrations.

The signal is generated inside the medium: its input at z = 0 is zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from . import bloch
from .bloch import SystemParams
from .errors import ConfigurationError, DomainError, NumericalBlowupError
from .units import eit_delay_gamma_units

__all__ = [
    "Z_STABILITY_LIMIT",
    "PulseSpec",
    "PropagationGrid",
    "FieldEnvelope",
    "PropagationResult",
    "propagate",
    "conversion_efficiency",
    "energy_transmission",
    "probe_delay",
]

log = logging.getLogger(__name__)

Z_STABILITY_LIMIT = 1.0

# 10-90 % rise of a raised-cosine ramp spans this fraction of the ramp
_RAISED_COSINE_10_90 = (math.acos(-0.8) - math.acos(0.8)) / math.pi


@dataclass(frozen=True)
class PulseSpec:
    """Temporal envelope of a driving, coupling or probe field.

    Times are in 1/Gamma.  For ``square`` pulses the half-maximum points sit
    at ``start_time`` and ``start_time + duration`` and the edges are
    raised-cosine ramps with a 10-90 % time of ``edge_time``.  For
    ``gaussian`` pulses ``duration`` is the intensity FWHM, centred at
    ``start_time + duration / 2``, and ``edge_time`` is ignored.
    """

    shape: Literal["square", "gaussian"] = "square"
    peak_rabi: complex = 1.0
    duration: float = 1.0
    edge_time: float = 0.0
    start_time: float = 0.0

    def __post_init__(self):
        if self.shape not in ("square", "gaussian"):
            raise ConfigurationError(f"unknown pulse shape {self.shape!r}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ConfigurationError(f"pulse duration must be > 0, got {self.duration!r}")
        if not (0 <= self.edge_time <= self.duration / 4):
            raise ConfigurationError(
                f"edge_time must lie in [0, duration/4], got {self.edge_time!r}")
        if not (math.isfinite(abs(self.peak_rabi)) and math.isfinite(self.start_time)):
            raise ConfigurationError("pulse peak and start time must be finite")

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    def envelope(self, t) -> np.ndarray:
        """Real envelope in [0, 1] sampled at times ``t``."""
        t = np.asarray(t, dtype=float)
        if self.shape == "gaussian":
            centre = self.start_time + 0.5 * self.duration
            # intensity FWHM -> amplitude: exp(-2 ln2 (t-t0)^2 / fwhm^2)
            return np.exp(-2.0 * math.log(2.0) * ((t - centre) / self.duration) ** 2)
        env = ((t >= self.start_time) & (t <= self.end_time)).astype(float)
        if self.edge_time > 0:
            ramp = self.edge_time / _RAISED_COSINE_10_90
            for edge, sign in ((self.start_time, 1.0), (self.end_time, -1.0)):
                local = sign * (t - edge) / ramp + 0.5
                inside = (local > 0) & (local < 1)
                env[inside] = 0.5 * (1.0 - np.cos(np.pi * local[inside]))
        return env

    def sample(self, t) -> np.ndarray:
        return complex(self.peak_rabi) * self.envelope(t).astype(np.complex128)

    def flat_top(self) -> tuple[float, float] | None:
        """Interval where a square pulse sits at full amplitude."""
        if self.shape != "square":
            return None
        half_ramp = 0.5 * self.edge_time / _RAISED_COSINE_10_90 if self.edge_time else 0.0
        return self.start_time + half_ramp, self.end_time - half_ramp


@dataclass(frozen=True)
class PropagationGrid:
    """Solver grid.  ``t_max`` of None means: choose the shortest valid window."""

    n_z: int = 200
    dt: float = 0.05
    t_max: float | None = None

    def __post_init__(self):
        if int(self.n_z) != self.n_z or self.n_z < 2:
            raise ConfigurationError(f"n_z must be an integer >= 2, got {self.n_z!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigurationError(f"dt must be > 0, got {self.dt!r}")
        if self.t_max is not None and not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ConfigurationError(f"t_max must be > 0, got {self.t_max!r}")

    def scaled(self, factor: float) -> "PropagationGrid":
        """Refine by ``factor``: n_z and 1/dt are both multiplied."""
        if not factor > 0:
            raise ConfigurationError(f"grid scale must be > 0, got {factor!r}")
        return PropagationGrid(max(2, int(round(self.n_z * factor))), self.dt / factor, self.t_max)


@dataclass(frozen=True)
class FieldEnvelope:
    """Complex Rabi-frequency samples on the uniform grid ``t0 + k dt``."""

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1:
            raise DomainError("envelope samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise DomainError("envelope samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def time(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def energy(self) -> float:
        return float(np.trapezoid(self.power, dx=self.dt))

    def centroid(self) -> float:
        weight = self.energy()
        if weight <= 0:
            raise DomainError("centroid undefined for a zero-energy envelope")
        return float(np.trapezoid(self.time * self.power, dx=self.dt)) / weight


@dataclass
class PropagationResult:
    probe_in: FieldEnvelope
    probe_out: FieldEnvelope
    signal_out: FieldEnvelope
    energy_transmission_probe: float = float("nan")
    conversion_efficiency: float = float("nan")
    probe_delay: float = float("nan")
    plateau_transmissions: tuple[float, float] | None = None
    metadata: dict = field(default_factory=dict)


def conversion_efficiency(result: PropagationResult) -> float:
    """Output signal energy divided by input probe energy."""
    e_in = result.probe_in.energy()
    if e_in <= 0:
        raise DomainError("incident probe carries no energy")
    return result.signal_out.energy() / e_in


def energy_transmission(result: PropagationResult) -> float:
    e_in = result.probe_in.energy()
    if e_in <= 0:
        raise DomainError("incident probe carries no energy")
    return result.probe_out.energy() / e_in


def probe_delay(result: PropagationResult) -> float:
    """Shift of the energy-weighted temporal centroid, in 1/Gamma."""
    return result.probe_out.centroid() - result.probe_in.centroid()


def _required_t_max(probe: PulseSpec, driving: PulseSpec, params: SystemParams,
                    omega_c: float) -> float:
    delay = eit_delay_gamma_units(params.alpha, params.gamma31, omega_c) if omega_c > 0 else 0.0
    end = max(probe.end_time, driving.end_time)
    if probe.shape == "gaussian":
        end = max(end, probe.start_time + 0.5 * probe.duration + 2.0 * probe.duration)
    return end + 2.0 * delay


def _plateau(probe: PulseSpec, out: FieldEnvelope) -> float | None:
    top = probe.flat_top()
    if top is None:
        return None
    lo = 0.5 * (probe.start_time + probe.end_time)
    t = out.time
    mask = (t >= lo) & (t <= top[1])
    peak = abs(complex(probe.peak_rabi)) ** 2
    if not mask.any() or peak == 0:
        return None
    return float(np.mean(out.power[mask])) / peak


def propagate(probe: PulseSpec, coupling: PulseSpec | float | None, driving: PulseSpec,
              params: SystemParams, grid: PropagationGrid = PropagationGrid()) -> PropagationResult:
    """Propagate the probe through the medium and return the output envelopes.

    ``coupling`` may be a pulse, a constant Rabi frequency, or None to use
    ``params.omega_c`` switched on throughout.
    """
    if coupling is None:
        coupling = params.omega_c
    if isinstance(coupling, PulseSpec):
        oc_peak = abs(complex(coupling.peak_rabi))
    else:
        oc_peak = abs(complex(coupling))

    needed = _required_t_max(probe, driving, params, oc_peak)
    t_max = needed if grid.t_max is None else grid.t_max
    if t_max < needed - 1e-9:
        raise ConfigurationError(
            f"t_max={t_max:g} does not cover the driving pulse plus twice the EIT delay "
            f"(needs >= {needed:g})")
    dz = 1.0 / grid.n_z
    if dz * params.alpha / 2.0 > Z_STABILITY_LIMIT:
        raise ConfigurationError(
            f"n_z={grid.n_z} too coarse for alpha={params.alpha:g}; "
            f"need n_z >= {math.ceil(params.alpha / (2.0 * Z_STABILITY_LIMIT))}")

    n_t = int(math.floor(t_max / grid.dt + 1e-9)) + 1
    t = grid.dt * np.arange(n_t)
    p_in = probe.sample(t)
    c = coupling.sample(t) if isinstance(coupling, PulseSpec) else np.full(n_t, complex(coupling))
    d = driving.sample(t)
    bloch._check_dt(grid.dt, params, float(np.max(np.abs(c))), float(np.max(np.abs(d))))

    p = p_in.copy()
    s = np.zeros(n_t, dtype=np.complex128)
    rho = np.empty((3, n_t), dtype=np.complex128)
    x0 = np.zeros(3, dtype=np.complex128)
    kp = 0.5j * params.alpha * params.gamma31
    ks = 0.5j * params.alpha * params.gamma41
    args = (grid.dt, params.delta, params.gamma21, params.gamma31, params.gamma41, x0)

    log.debug("propagate: n_t=%d n_z=%d dt=%g", n_t, grid.n_z, grid.dt)
    for j in range(grid.n_z):
        bloch._integrate_slice(p, s, c, d, *args, rho[0], rho[1], rho[2])
        p_half = p + (0.5 * dz * kp) * rho[0]
        s_half = s + (0.5 * dz * ks) * rho[1]
        bloch._integrate_slice(p_half, s_half, c, d, *args, rho[0], rho[1], rho[2])
        p += (dz * kp) * rho[0]
        s += (dz * ks) * rho[1]
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(s))):
            raise NumericalBlowupError(
                f"non-finite field after z step {j + 1} of {grid.n_z}", step_index=j + 1)

    probe_in = FieldEnvelope(p_in, grid.dt)
    probe_out = FieldEnvelope(p, grid.dt)
    signal_out = FieldEnvelope(s, grid.dt)
    result = PropagationResult(probe_in, probe_out, signal_out)
    result.energy_transmission_probe = energy_transmission(result)
    result.conversion_efficiency = conversion_efficiency(result)
    try:
        result.probe_delay = probe_delay(result)
    except DomainError:
        result.probe_delay = float("nan")
    plateau_p = _plateau(probe, probe_out)
    plateau_s = _plateau(probe, signal_out)
    if plateau_p is not None and plateau_s is not None:
        result.plateau_transmissions = (plateau_p, plateau_s)
    result.metadata = {
        "params": asdict(params),
        "probe": asdict(probe),
        "coupling": asdict(coupling) if isinstance(coupling, PulseSpec) else complex(coupling),
        "driving": asdict(driving),
        "grid": {"n_z": grid.n_z, "dt": grid.dt, "t_max": t_max},
        "edge_time": probe.edge_time,
        "efficiency_definition": "energy ratio",
    }
    return result
