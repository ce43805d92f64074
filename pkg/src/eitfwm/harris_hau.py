"""Harris-Hau estimate of pulsed-regime FWM efficiency.

zeta = N_d * (sigma24 / A) * Phi(eta, r)

Phi is not computed here; callers pass it in.  ``PHI_REFERENCE`` is the
reference value at (eta, r) = (0.27, 0.048).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "PHI_REFERENCE",
    "FOCUSED_CROSS_SECTION_RATIO",
    "HarrisHauInputs",
    "loss_parameter",
    "delay_ratio",
    "zeta",
]

PHI_REFERENCE = 4.5e-3
# drive focused onto one atomic cross section: sigma24 / A = averaged CG factor
FOCUSED_CROSS_SECTION_RATIO = 2.0 / 9.0


@dataclass(frozen=True)
class HarrisHauInputs:
    n_drive_photons: float
    cross_section_ratio: float
    phi: float
    eta: float = float("nan")
    r: float = float("nan")

    def __post_init__(self):
        for name in ("n_drive_photons", "cross_section_ratio", "phi"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        for name in ("eta", "r"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")
        if self.cross_section_ratio > 1:
            warnings.warn(f"cross_section_ratio={self.cross_section_ratio:g} > 1: "
                          "drive spot smaller than the atomic cross section", stacklevel=3)


def loss_parameter(alpha: float, delta: float, gamma31: float) -> float:
    """Off-resonant loss r = gamma31^2 alpha / (8 Delta^2 + 2 gamma31^2)."""
    if not gamma31 > 0:
        raise DomainError(f"gamma31 must be > 0, got {gamma31!r}")
    return gamma31**2 * alpha / (8.0 * delta**2 + 2.0 * gamma31**2)


def delay_ratio(t_delay: float, t_probe: float) -> float:
    """eta = T_d / T_p (any common time unit)."""
    if not t_probe > 0:
        raise DomainError(f"probe duration must be > 0, got {t_probe!r}")
    return t_delay / t_probe


def zeta(inputs: HarrisHauInputs) -> float:
    return inputs.n_drive_photons * inputs.cross_section_ratio * inputs.phi
