"""Closed-form steady-state probe and signal outputs.

Valid for a lossless ground-state coherence (gamma21 = 0) and equal
excited-state decay rates (gamma31 = gamma41), which is why only a single
``gamma31`` appears in the inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .errors import DomainError

__all__ = [
    "SteadyStateInputs",
    "SteadyStateSolution",
    "steady_state",
    "total_transmission",
    "efficiency_vs_detuning",
]


@dataclass(frozen=True)
class SteadyStateInputs:
    omega_c: float
    omega_d: float
    delta: float
    gamma31: float
    alpha: float

    def __post_init__(self):
        if self.omega_c < 0 or self.omega_d < 0:
            raise DomainError("Rabi frequencies must be non-negative")
        if self.omega_c == 0 and self.omega_d == 0:
            raise DomainError("omega_c and omega_d cannot both be zero (Omega^2 = 0)")
        if not self.gamma31 > 0:
            raise DomainError(f"gamma31 must be > 0, got {self.gamma31!r}")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha!r}")
        for name in ("omega_c", "omega_d", "delta", "gamma31", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")


@dataclass(frozen=True)
class SteadyStateSolution:
    probe_ratio: complex
    signal_ratio: complex
    omega_sq: float
    xi: complex

    @property
    def probe_transmission(self) -> float:
        return abs(self.probe_ratio) ** 2

    @property
    def signal_efficiency(self) -> float:
        return abs(self.signal_ratio) ** 2


def _omega_sq_and_xi(inputs: SteadyStateInputs) -> tuple[float, complex]:
    omega_sq = inputs.omega_c**2 + inputs.omega_d**2
    xi = 1j + 2.0 * inputs.omega_c**2 * inputs.delta / (omega_sq * inputs.gamma31)
    return omega_sq, xi


def steady_state(inputs: SteadyStateInputs) -> SteadyStateSolution:
    """Output probe and signal amplitudes relative to the incident probe."""
    omega_sq, xi = _omega_sq_and_xi(inputs)
    f = np.exp(-1j * inputs.alpha / (2.0 * xi))
    cd = inputs.omega_c * inputs.omega_d
    probe = (inputs.omega_c**2 + inputs.omega_d**2 * f) / omega_sq
    signal = (cd - cd * f) / omega_sq
    return SteadyStateSolution(complex(probe), complex(signal), omega_sq, complex(xi))


def total_transmission(inputs: SteadyStateInputs) -> float:
    """Probe transmission plus signal efficiency, from the modulus of the decay factor."""
    omega_sq, xi = _omega_sq_and_xi(inputs)
    f_abs_sq = math.exp(-inputs.alpha * (1j / xi).real)
    return (inputs.omega_c**2 + inputs.omega_d**2 * f_abs_sq) / omega_sq


def efficiency_vs_detuning(base: SteadyStateInputs,
                           deltas: Iterable[float]) -> list[tuple[float, float, float]]:
    """Evaluate ``steady_state`` along a detuning grid.

    Returns ``(delta, probe_transmission, signal_efficiency)`` tuples in the
    order of ``deltas``.
    """
    rows = []
    for delta in deltas:
        sol = steady_state(replace(base, delta=float(delta)))
        rows.append((float(delta), sol.probe_transmission, sol.signal_efficiency))
    return rows
