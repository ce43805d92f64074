"""Linearized optical Bloch equations for the four-level FWM system.

Weak-probe limit: all population stays in |1> (rho11 = 1), so only the
three coherences rho31, rho41 and rho21 are evolved:

    d rho41/dt = i/2 Os + i/2 Od rho21 + (i Delta - g41/2) rho41
    d rho31/dt = i/2 Op + i/2 Oc rho21 - g31/2 rho31
    d rho21/dt = i/2 Oc* rho31 + i/2 Od* rho41 - g21/2 rho21

Rates are in units of Gamma and times in 1/Gamma.  The linearization holds
for |Op|, |Os| << |Oc|.

Time stepping uses the classical four-stage Runge-Kutta scheme with the
fields linearly interpolated to the half step.  It is only accepted for

    dt * max(|i Delta - g41/2|, g31/2, g21/2, (|Oc| + |Od|)/2) <= DT_STABILITY_LIMIT
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigurationError, DomainError, SingularSystemError

__all__ = [
    "DT_STABILITY_LIMIT",
    "SystemParams",
    "CoherenceState",
    "coherence_derivatives",
    "steady_coherences",
    "max_stable_dt",
    "step",
    "evolve",
]

DT_STABILITY_LIMIT = 1.0


@dataclass(frozen=True)
class SystemParams:
    omega_c: float
    delta: float
    gamma21: float
    gamma31: float = 1.25
    gamma41: float = 1.25
    alpha: float = 0.0

    def __post_init__(self):
        for name in ("omega_c", "delta", "gamma21", "gamma31", "gamma41", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.gamma31 <= 0 or self.gamma41 <= 0:
            raise DomainError("gamma31 and gamma41 must be > 0")
        if self.gamma21 < 0:
            raise DomainError(f"gamma21 must be >= 0, got {self.gamma21!r}")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha!r}")


@dataclass(frozen=True)
class CoherenceState:
    rho31: complex = 0j
    rho41: complex = 0j
    rho21: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.rho31, self.rho41, self.rho21], dtype=np.complex128)

    @classmethod
    def from_array(cls, values) -> "CoherenceState":
        r31, r41, r21 = (complex(v) for v in values)
        return cls(r31, r41, r21)

    def is_finite(self) -> bool:
        return all(math.isfinite(abs(v)) for v in (self.rho31, self.rho41, self.rho21))


def _rate_matrix(omega_c: complex, omega_d: complex, params: SystemParams) -> np.ndarray:
    # state ordering (rho31, rho41, rho21)
    return np.array([
        [-0.5 * params.gamma31, 0.0, 0.5j * omega_c],
        [0.0, 1j * params.delta - 0.5 * params.gamma41, 0.5j * omega_d],
        [0.5j * np.conj(omega_c), 0.5j * np.conj(omega_d), -0.5 * params.gamma21],
    ], dtype=np.complex128)


def coherence_derivatives(state: CoherenceState, omega_p: complex, omega_s: complex,
                          omega_d: complex, params: SystemParams,
                          omega_c: complex | None = None) -> CoherenceState:
    """Right-hand side of the Bloch equations.

    ``omega_c`` defaults to the constant coupling Rabi frequency in ``params``.
    """
    oc = params.omega_c if omega_c is None else omega_c
    r31, r41, r21 = state.rho31, state.rho41, state.rho21
    d41 = 0.5j * omega_s + 0.5j * omega_d * r21 + (1j * params.delta - 0.5 * params.gamma41) * r41
    d31 = 0.5j * omega_p + 0.5j * oc * r21 - 0.5 * params.gamma31 * r31
    d21 = (0.5j * np.conj(oc) * r31 + 0.5j * np.conj(omega_d) * r41
           - 0.5 * params.gamma21 * r21)
    return CoherenceState(complex(d31), complex(d41), complex(d21))


def steady_coherences(omega_p: complex, omega_s: complex, omega_d: complex,
                      params: SystemParams, omega_c: complex | None = None) -> CoherenceState:
    """Stationary coherences for constant fields."""
    oc = params.omega_c if omega_c is None else omega_c
    a = _rate_matrix(oc, omega_d, params)
    if not np.all(np.isfinite(a)) or np.linalg.cond(a) > 1e13:
        raise SingularSystemError(
            "steady-state Bloch system is singular for "
            f"omega_c={oc!r}, omega_d={omega_d!r}, gamma21={params.gamma21!r}, "
            f"delta={params.delta!r}; a non-zero coupling or drive is required "
            "when gamma21 = 0")
    b = np.array([0.5j * omega_p, 0.5j * omega_s, 0.0], dtype=np.complex128)
    return CoherenceState.from_array(np.linalg.solve(a, -b))


def max_stable_dt(params: SystemParams, omega_c_max: float | None = None,
                  omega_d_max: float = 0.0) -> float:
    """Largest time step accepted by :func:`step` and :func:`evolve`."""
    oc = abs(params.omega_c) if omega_c_max is None else abs(omega_c_max)
    rate = max(abs(complex(-0.5 * params.gamma41, params.delta)),
               0.5 * params.gamma31, 0.5 * params.gamma21,
               0.5 * (oc + abs(omega_d_max)))
    return DT_STABILITY_LIMIT / rate


def _check_dt(dt: float, params: SystemParams, omega_c_max: float, omega_d_max: float):
    if not dt > 0:
        raise ConfigurationError(f"time step must be > 0, got {dt!r}")
    limit = max_stable_dt(params, omega_c_max, omega_d_max)
    if dt > limit:
        raise ConfigurationError(
            f"time step {dt:g} exceeds the RK4 stability bound {limit:g} "
            f"(delta={params.delta:g}, gamma41={params.gamma41:g})")


def step(state: CoherenceState, fields_t: tuple, fields_next: tuple,
         params: SystemParams, dt: float) -> CoherenceState:
    """Advance one RK4 step.

    ``fields_t`` and ``fields_next`` are ``(omega_p, omega_s, omega_c,
    omega_d)`` tuples at ``t`` and ``t + dt``.
    """
    _check_dt(dt, params, max(abs(fields_t[2]), abs(fields_next[2])),
              max(abs(fields_t[3]), abs(fields_next[3])))
    f0 = tuple(complex(v) for v in fields_t)
    f1 = tuple(complex(v) for v in fields_next)
    fh = tuple(0.5 * (a + b) for a, b in zip(f0, f1))

    def rhs(x: np.ndarray, f) -> np.ndarray:
        p, s, c, d = f
        return _rate_matrix(c, d, params) @ x + np.array([0.5j * p, 0.5j * s, 0.0])

    x = state.as_array()
    k1 = rhs(x, f0)
    k2 = rhs(x + 0.5 * dt * k1, fh)
    k3 = rhs(x + 0.5 * dt * k2, fh)
    k4 = rhs(x + dt * k3, f1)
    return CoherenceState.from_array(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


@numba.njit(cache=True)
def _integrate_slice(P, S, C, D, dt, delta, g21, g31, g41, x0, r31, r41, r21):
    # Same RK4 update as `step`, specialised for sampled field arrays.
    n = P.shape[0]
    a41 = 1j * delta - 0.5 * g41
    a31 = -0.5 * g31
    a21 = -0.5 * g21
    h = 0.5 * dt
    s6 = dt / 6.0
    x31 = x0[0]
    x41 = x0[1]
    x21 = x0[2]
    r31[0] = x31
    r41[0] = x41
    r21[0] = x21
    c0 = C[0]
    d0 = D[0]
    for k in range(n - 1):
        c1 = C[k + 1]
        d1 = D[k + 1]
        ch = 0.5 * (c0 + c1)
        dh = 0.5 * (d0 + d1)
        ph = 0.5 * (P[k] + P[k + 1])
        sh = 0.5 * (S[k] + S[k + 1])

        k41 = 0.5j * (S[k] + d0 * x21) + a41 * x41
        k31 = 0.5j * (P[k] + c0 * x21) + a31 * x31
        k21 = 0.5j * (c0.conjugate() * x31 + d0.conjugate() * x41) + a21 * x21

        y41 = x41 + h * k41
        y31 = x31 + h * k31
        y21 = x21 + h * k21
        l41 = 0.5j * (sh + dh * y21) + a41 * y41
        l31 = 0.5j * (ph + ch * y21) + a31 * y31
        l21 = 0.5j * (ch.conjugate() * y31 + dh.conjugate() * y41) + a21 * y21

        y41 = x41 + h * l41
        y31 = x31 + h * l31
        y21 = x21 + h * l21
        m41 = 0.5j * (sh + dh * y21) + a41 * y41
        m31 = 0.5j * (ph + ch * y21) + a31 * y31
        m21 = 0.5j * (ch.conjugate() * y31 + dh.conjugate() * y41) + a21 * y21

        y41 = x41 + dt * m41
        y31 = x31 + dt * m31
        y21 = x21 + dt * m21
        n41 = 0.5j * (S[k + 1] + d1 * y21) + a41 * y41
        n31 = 0.5j * (P[k + 1] + c1 * y21) + a31 * y31
        n21 = 0.5j * (c1.conjugate() * y31 + d1.conjugate() * y41) + a21 * y21

        x41 += s6 * (k41 + 2.0 * (l41 + m41) + n41)
        x31 += s6 * (k31 + 2.0 * (l31 + m31) + n31)
        x21 += s6 * (k21 + 2.0 * (l21 + m21) + n21)
        r31[k + 1] = x31
        r41[k + 1] = x41
        r21[k + 1] = x21
        c0 = c1
        d0 = d1


def evolve(omega_p, omega_s, omega_c, omega_d, params: SystemParams, dt: float,
           initial: CoherenceState | None = None) -> np.ndarray:
    """Integrate a single slice over sampled field arrays.

    All four field arguments are arrays (or scalars broadcast to the common
    length) sampled every ``dt``.  Returns a complex array of shape
    ``(n, 3)`` holding (rho31, rho41, rho21) at every sample.
    """
    arrays = np.broadcast_arrays(*(np.asarray(f, dtype=np.complex128)
                                   for f in (omega_p, omega_s, omega_c, omega_d)))
    p, s, c, d = (np.ascontiguousarray(a) for a in arrays)
    if p.ndim != 1 or p.size < 1:
        raise ConfigurationError("field samples must be one-dimensional and non-empty")
    _check_dt(dt, params, float(np.max(np.abs(c))), float(np.max(np.abs(d))))
    x0 = (initial or CoherenceState()).as_array()
    out = np.empty((3, p.size), dtype=np.complex128)
    _integrate_slice(p, s, c, d, float(dt), params.delta, params.gamma21,
                     params.gamma31, params.gamma41, x0, out[0], out[1], out[2])
    return out.T
