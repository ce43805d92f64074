"""Physical constants, unit conversions and photon-budget arithmetic.

Rates and Rabi frequencies everywhere else in the package are expressed in
units of the excited-state decay rate Gamma; times are in 1/Gamma.  This
module is the only place where laboratory units (seconds, mW/cm^2, metres)
enter.  Defaults describe the 87Rb D2 line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from scipy import constants as _sc

from .errors import DomainError

__all__ = [
    "PhysicalConstants",
    "MediumSpec",
    "RB87_D2",
    "rabi_to_intensity",
    "intensity_to_rabi",
    "photons_per_atomic_cross_section",
    "atomic_cross_section",
    "eit_delay_time",
    "eit_delay_gamma_units",
    "optical_depth",
    "seconds_to_gamma_time",
    "gamma_time_to_seconds",
    "us_to_gamma_time",
    "gamma_time_to_us",
]


@dataclass(frozen=True)
class PhysicalConstants:
    Gamma_rad_per_s: float = 2.0 * math.pi * 6.0e6
    I_sat: float = 1.63  # mW/cm^2
    cg_factor_sq: float = 2.0 / 9.0
    wavelength: float = 780.24e-9  # m
    speed_of_light: float = _sc.c
    planck_h: float = _sc.h

    def __post_init__(self):
        for name in ("Gamma_rad_per_s", "I_sat", "cg_factor_sq", "wavelength",
                     "speed_of_light", "planck_h"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        if self.cg_factor_sq > 1:
            raise DomainError(f"cg_factor_sq must be <= 1, got {self.cg_factor_sq!r}")


RB87_D2 = PhysicalConstants()


@dataclass(frozen=True)
class MediumSpec:
    """Atomic cloud described by density, cross sections (m^2) and length (m)."""

    number_density: float
    cross_section_probe: float
    cross_section_signal: float
    cross_section_drive: float
    path_length: float

    def __post_init__(self):
        for name in ("number_density", "cross_section_probe", "cross_section_signal",
                     "cross_section_drive", "path_length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")


def seconds_to_gamma_time(seconds: float, consts: PhysicalConstants = RB87_D2) -> float:
    return seconds * consts.Gamma_rad_per_s


def gamma_time_to_seconds(t: float, consts: PhysicalConstants = RB87_D2) -> float:
    return t / consts.Gamma_rad_per_s


def us_to_gamma_time(microseconds: float, consts: PhysicalConstants = RB87_D2) -> float:
    return microseconds * 1e-6 * consts.Gamma_rad_per_s


def gamma_time_to_us(t: float, consts: PhysicalConstants = RB87_D2) -> float:
    return t / consts.Gamma_rad_per_s * 1e6


def rabi_to_intensity(omega_over_gamma: float, consts: PhysicalConstants = RB87_D2) -> float:
    """Peak intensity in mW/cm^2 of a field with Rabi frequency ``omega_over_gamma``.

    I = 2 (Omega/Gamma)^2 I_sat / a^2, with a^2 the averaged squared
    Clebsch-Gordan coefficient.
    """
    if not omega_over_gamma >= 0:
        raise DomainError(f"Rabi frequency must be >= 0, got {omega_over_gamma!r}")
    return 2.0 * omega_over_gamma**2 * consts.I_sat / consts.cg_factor_sq


def intensity_to_rabi(intensity: float, consts: PhysicalConstants = RB87_D2) -> float:
    """Inverse of :func:`rabi_to_intensity`; intensity in mW/cm^2."""
    if not intensity >= 0:
        raise DomainError(f"intensity must be >= 0, got {intensity!r}")
    return math.sqrt(intensity * consts.cg_factor_sq / (2.0 * consts.I_sat))


def atomic_cross_section(consts: PhysicalConstants = RB87_D2) -> float:
    """Resonant cross section 3 lambda^2 / 2 pi in m^2."""
    return 3.0 * consts.wavelength**2 / (2.0 * math.pi)


def photons_per_atomic_cross_section(intensity: float, duration: float,
                                     consts: PhysicalConstants = RB87_D2) -> float:
    """Number of photons crossing one atomic cross section.

    ``intensity`` is in mW/cm^2 and ``duration`` in seconds.
    """
    if not intensity >= 0:
        raise DomainError(f"intensity must be >= 0, got {intensity!r}")
    if not duration > 0:
        raise DomainError(f"duration must be > 0, got {duration!r}")
    intensity_si = intensity * 10.0  # mW/cm^2 -> W/m^2
    photon_energy = consts.planck_h * consts.speed_of_light / consts.wavelength
    return intensity_si * duration * atomic_cross_section(consts) / photon_energy


def eit_delay_gamma_units(alpha: float, gamma31: float, omega_c: float) -> float:
    """EIT group delay alpha*gamma31/Omega_c^2 in units of 1/Gamma."""
    if not omega_c > 0:
        raise DomainError(f"omega_c must be > 0 for a finite delay, got {omega_c!r}")
    if alpha < 0 or gamma31 < 0:
        raise DomainError("alpha and gamma31 must be non-negative")
    return alpha * gamma31 / omega_c**2


def eit_delay_time(alpha: float, gamma31: float, omega_c: float,
                   consts: PhysicalConstants = RB87_D2) -> float:
    """EIT group delay in seconds."""
    return gamma_time_to_seconds(eit_delay_gamma_units(alpha, gamma31, omega_c), consts)


def optical_depth(medium: MediumSpec,
                  transition: Literal["probe", "signal"] = "probe") -> float:
    if transition == "probe":
        sigma = medium.cross_section_probe
    elif transition == "signal":
        sigma = medium.cross_section_signal
    else:
        raise DomainError(f"unknown transition {transition!r}; use 'probe' or 'signal'")
    return medium.number_density * sigma * medium.path_length
