"""Recover the driving Rabi frequency and ground-state dephasing from traces.

The objective is the summed squared difference between simulated and
measured transmitted-probe and signal powers, both channels weighted
equally.  It is minimized with a bounded Nelder-Mead simplex over
(omega_d, log gamma21), rescaled to the unit square, starting from the best
point of a 5x5 scan of the bounds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np
from scipy.optimize import minimize

from .bloch import SystemParams
from .csvio import format_number, read_table
from .errors import ConfigurationError, TraceFormatError
from .propagator import PropagationGrid, PulseSpec, propagate
from .units import RB87_D2, PhysicalConstants, gamma_time_to_us

__all__ = [
    "MIN_TRACE_LENGTH",
    "Trace",
    "FitResult",
    "TraceSimulator",
    "load_trace",
    "fit",
]

log = logging.getLogger(__name__)

MIN_TRACE_LENGTH = 16
SIMPLEX_TOLERANCE = 1e-4


@dataclass
class Trace:
    """Probe and signal powers versus time (us), normalized to the incident probe peak.

    ``probe_norm`` is the value of the incident probe peak in the units of
    the power arrays (1.0 for normalized data).
    """

    time: np.ndarray
    probe_power: np.ndarray
    signal_power: np.ndarray
    metadata: dict = field(default_factory=dict)
    probe_norm: float = 1.0

    def __post_init__(self):
        self.time = np.asarray(self.time, dtype=float)
        self.probe_power = np.asarray(self.probe_power, dtype=float)
        self.signal_power = np.asarray(self.signal_power, dtype=float)
        n = self.time.size
        if self.probe_power.size != n or self.signal_power.size != n:
            raise TraceFormatError("time, probe and signal arrays differ in length")
        if n < MIN_TRACE_LENGTH:
            raise TraceFormatError(f"trace has {n} samples; at least {MIN_TRACE_LENGTH} required")
        if not np.all(np.diff(self.time) > 0):
            bad = int(np.argmin(np.diff(self.time) > 0)) + 1
            raise TraceFormatError(f"time is not strictly increasing at sample {bad}", row=bad)
        for name in ("probe_power", "signal_power"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                bad = int(np.argmax(~np.isfinite(arr) | (arr < 0)))
                raise TraceFormatError(f"{name} is negative or non-finite at sample {bad}",
                                       row=bad, column=name)
        if not self.probe_norm > 0:
            raise TraceFormatError("probe_norm must be > 0")


@dataclass
class FitResult:
    omega_d_hat: float
    gamma21_hat: float
    sse: float
    n_evals: int
    converged: bool
    per_parameter_sensitivity: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [
            f"omega_d_hat={format_number(self.omega_d_hat)}",
            f"gamma21_hat={format_number(self.gamma21_hat)}",
            f"sse={format_number(self.sse)}",
            f"n_evals={self.n_evals}",
            f"converged={str(self.converged).lower()}",
        ]
        for key, value in self.per_parameter_sensitivity.items():
            lines.append(f"curvature_{key}={format_number(value)}")
        return "\n".join(lines) + "\n"

    def csv_header(self) -> str:
        return "omega_d_hat,gamma21_hat,sse,n_evals,converged"

    def csv_row(self) -> str:
        return ",".join([format_number(self.omega_d_hat), format_number(self.gamma21_hat),
                         format_number(self.sse), str(self.n_evals),
                         str(int(self.converged))])


def load_trace(path) -> Trace:
    """Read a trace from the envelope CSV format."""
    meta, columns, rows = read_table(path)
    required = ("time_us", "probe_out_norm", "signal_out_norm")
    missing = [c for c in required if c not in columns]
    if missing:
        raise TraceFormatError(f"{path}: missing column(s) {', '.join(missing)}",
                               column=missing[0])
    if not rows:
        raise TraceFormatError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    col = {name: data[:, i] for i, name in enumerate(columns)}
    negative = [(i, c) for c in ("probe_out_norm", "signal_out_norm")
                for i in np.flatnonzero(col[c] < 0)[:1]]
    if negative:
        i, c = min(negative)
        raise TraceFormatError(f"{path}: negative power in column {c!r} at data row {i + 1}",
                               row=int(i) + 1, column=c)
    if np.any(np.diff(col["time_us"]) <= 0):
        i = int(np.flatnonzero(np.diff(col["time_us"]) <= 0)[0]) + 2
        raise TraceFormatError(f"{path}: time_us not strictly increasing at data row {i}",
                               row=i, column="time_us")
    return Trace(col["time_us"], col["probe_out_norm"], col["signal_out_norm"], meta)


class TraceSimulator:
    """Memoized simulated traces for a fixed experiment, keyed by (omega_d, gamma21).

    One instance may be shared between fits of different traces recorded
    under the same conditions.
    """

    def __init__(self, fixed: SystemParams, probe: PulseSpec, driving: PulseSpec,
                 grid: PropagationGrid = PropagationGrid(), coupling=None,
                 consts: PhysicalConstants = RB87_D2):
        self.fixed = fixed
        self.probe = probe
        self.driving = driving
        self.grid = grid
        self.coupling = coupling
        self.consts = consts
        self._cache: dict[tuple[float, float], tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        self.n_solves = 0

    def envelopes(self, omega_d: float, gamma21: float):
        """(time_us, probe_out, signal_out) normalized to the incident probe peak."""
        key = (float(omega_d), float(gamma21))
        hit = self._cache.get(key)
        if hit is None:
            params = replace(self.fixed, gamma21=key[1])
            driving = replace(self.driving, peak_rabi=key[0])
            res = propagate(self.probe, self.coupling, driving, params, self.grid)
            peak = abs(complex(self.probe.peak_rabi)) ** 2
            hit = (gamma_time_to_us(res.probe_out.time, self.consts),
                   res.probe_out.power / peak, res.signal_out.power / peak)
            self._cache[key] = hit
            self.n_solves += 1
        return hit

    def sample(self, omega_d: float, gamma21: float, time_us) -> tuple[np.ndarray, np.ndarray]:
        t, p, s = self.envelopes(omega_d, gamma21)
        return np.interp(time_us, t, p, right=0.0), np.interp(time_us, t, s, right=0.0)


def _check_bounds(bounds: Mapping[str, tuple[float, float]]):
    try:
        od = tuple(float(v) for v in bounds["omega_d"])
        g = tuple(float(v) for v in bounds["gamma21"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError("bounds need 'omega_d' and 'gamma21' (lo, hi) pairs") from exc
    for name, (lo, hi) in (("omega_d", od), ("gamma21", g)):
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi or lo < 0:
            raise ConfigurationError(f"invalid {name} bounds ({lo}, {hi})")
    if g[0] == 0 and g[1] > 0:
        raise ConfigurationError("gamma21 is fitted in log scale; its lower bound must be > 0")
    return od, g


def fit(trace: Trace, fixed: SystemParams, pulses: Mapping[str, PulseSpec],
        bounds: Mapping[str, tuple[float, float]], grid: PropagationGrid = PropagationGrid(),
        *, max_evals: int = 400, sensitivity: bool = True,
        simulator: TraceSimulator | None = None) -> FitResult:
    """Least-squares estimate of (omega_d, gamma21) for ``trace``.

    ``pulses`` maps ``probe`` and ``driving`` (and optionally ``coupling``)
    to pulse specs; the driving peak is replaced by the trial omega_d.
    ``fixed.gamma21`` is ignored.  Running out of evaluations returns the
    best point found with ``converged=False``.
    """
    (od_lo, od_hi), (g_lo, g_hi) = _check_bounds(bounds)
    if simulator is None:
        simulator = TraceSimulator(fixed, pulses["probe"], pulses["driving"], grid,
                                   pulses.get("coupling"))
    norm = trace.probe_norm

    log_g_lo = math.log(g_lo) if g_lo > 0 else 0.0
    log_g_hi = math.log(g_hi) if g_hi > 0 else 0.0
    free = [od_hi > od_lo, g_hi > g_lo]

    def unpack(u) -> tuple[float, float]:
        od = od_lo + u[0] * (od_hi - od_lo) if free[0] else od_lo
        g = math.exp(log_g_lo + u[1] * (log_g_hi - log_g_lo)) if free[1] else g_lo
        return od, g

    n_evals = 0

    def sse(u) -> float:
        nonlocal n_evals
        n_evals += 1
        p, s = simulator.sample(*unpack(u), trace.time)
        return float(np.sum((norm * p - trace.probe_power) ** 2)
                     + np.sum((norm * s - trace.signal_power) ** 2))

    idx = [i for i in range(2) if free[i]]
    if not idx:
        value = sse(np.zeros(2))
        return FitResult(od_lo, g_lo, value, n_evals, True)

    # coarse scan seeds the simplex
    levels = np.linspace(0.0, 1.0, 5)
    best_u, best_f = None, math.inf
    for a in (levels if free[0] else [0.0]):
        for b in (levels if free[1] else [0.0]):
            u = np.array([a, b])
            f = sse(u)
            if f < best_f:
                best_u, best_f = u, f

    def reduced(v):
        u = best_u.copy()
        u[idx] = v
        return sse(u)

    x0 = best_u[idx]
    step = 0.125
    simplex = [x0.copy()]
    for k in range(len(idx)):
        vertex = x0.copy()
        vertex[k] = vertex[k] + step if vertex[k] + step <= 1.0 else vertex[k] - step
        simplex.append(vertex)
    remaining = max(1, max_evals - n_evals)
    opt = minimize(reduced, x0, method="Nelder-Mead",
                   bounds=[(0.0, 1.0)] * len(idx),
                   options={"xatol": SIMPLEX_TOLERANCE, "fatol": math.inf,
                            "maxfev": remaining, "initial_simplex": np.array(simplex)})
    final = opt.final_simplex[0]
    diameter = float(np.max(np.abs(final[1:] - final[0])))
    converged = bool(opt.success) and diameter < SIMPLEX_TOLERANCE

    u_hat = best_u.copy()
    u_hat[idx] = opt.x
    f_hat = float(opt.fun)
    if best_f < f_hat:
        u_hat, f_hat = best_u, best_f
    od_hat, g_hat = unpack(u_hat)

    curvature = {}
    if sensitivity:
        h = 1e-2
        for i, name in ((0, "omega_d"), (1, "gamma21")):
            if not free[i]:
                continue
            lo_u, hi_u = u_hat.copy(), u_hat.copy()
            lo_u[i] = max(0.0, u_hat[i] - h)
            hi_u[i] = min(1.0, u_hat[i] + h)
            span = hi_u[i] - lo_u[i]
            mid = 0.5 * (lo_u[i] + hi_u[i])
            mid_u = u_hat.copy()
            mid_u[i] = mid
            f_mid = f_hat if mid == u_hat[i] else sse(mid_u)
            # second difference in unit-square coordinates
            curvature[name] = (sse(hi_u) - 2.0 * f_mid + sse(lo_u)) / (0.5 * span) ** 2

    log.info("fit: omega_d=%.6g gamma21=%.4g sse=%.4g evals=%d converged=%s",
             od_hat, g_hat, f_hat, n_evals, converged)
    return FitResult(float(od_hat), float(g_hat), f_hat, n_evals, converged, curvature)
