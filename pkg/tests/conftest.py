import sys

import pytest

from eitfwm.bloch import SystemParams
from eitfwm.propagator import PulseSpec
from eitfwm.units import us_to_gamma_time


def lab_pulses(omega_d, probe_peak=1e-3, probe_us=50.0, drive_us=70.0, edge_us=0.5, start_us=2.0):
    """Probe and driving square pulses fired together, as in the experiment."""
    probe = PulseSpec("square", probe_peak, us_to_gamma_time(probe_us),
                      us_to_gamma_time(edge_us), us_to_gamma_time(start_us))
    driving = PulseSpec("square", omega_d, us_to_gamma_time(drive_us),
                        us_to_gamma_time(edge_us), us_to_gamma_time(start_us))
    return probe, driving


def short_pulses(omega_d, probe_peak=1e-3, duration=300.0, edge=20.0, start=20.0):
    """Pulses a few hundred 1/Gamma long, for cheap property checks."""
    probe = PulseSpec("square", probe_peak, duration, edge, start)
    driving = PulseSpec("square", omega_d, duration + 200.0, edge, start)
    return probe, driving


@pytest.fixture
def fig2_params():
    return SystemParams(omega_c=0.32, delta=13.0, gamma21=9e-4, gamma31=1.25, gamma41=1.25,
                        alpha=42.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
