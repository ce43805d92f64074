"""EIT-based four-wave mixing in a four-level atomic medium.

Closed-form steady state (:mod:`eitfwm.steady`), linearized Bloch dynamics
(:mod:`eitfwm.bloch`), pulsed Maxwell-Bloch propagation
(:mod:`eitfwm.propagator`), the Harris-Hau pulsed efficiency estimate
(:mod:`eitfwm.harris_hau`), unit conversions (:mod:`eitfwm.units`) and trace
fitting (:mod:`eitfwm.fitting`).  Rates are in units of Gamma, times in 1/Gamma.
"""

from .bloch import CoherenceState, SystemParams
from .errors import (ConfigurationError, DomainError, EITFWMError, NumericalBlowupError,
                     SingularSystemError, TraceFormatError)
from .propagator import PropagationGrid, PropagationResult, PulseSpec, propagate
from .steady import SteadyStateInputs, SteadyStateSolution, steady_state

__version__ = "0.1.0"

__all__ = [
    "CoherenceState",
    "SystemParams",
    "ConfigurationError",
    "DomainError",
    "EITFWMError",
    "NumericalBlowupError",
    "SingularSystemError",
    "TraceFormatError",
    "PropagationGrid",
    "PropagationResult",
    "PulseSpec",
    "propagate",
    "SteadyStateInputs",
    "SteadyStateSolution",
    "steady_state",
]
