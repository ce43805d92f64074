import math

import pytest
from hypothesis import given, strategies as st

from eitfwm.errors import DomainError
from eitfwm.units import (RB87_D2, MediumSpec, PhysicalConstants, atomic_cross_section,
                          eit_delay_gamma_units, eit_delay_time, intensity_to_rabi,
                          optical_depth, photons_per_atomic_cross_section, rabi_to_intensity,
                          us_to_gamma_time)


def test_constants_defaults():
    assert RB87_D2.Gamma_rad_per_s == pytest.approx(2 * math.pi * 6e6)
    assert RB87_D2.cg_factor_sq == pytest.approx(2 / 9)
    assert RB87_D2.wavelength == pytest.approx(780.24e-9)


@pytest.mark.parametrize("field", ["I_sat", "wavelength", "cg_factor_sq"])
def test_constants_reject_nonpositive(field):
    with pytest.raises(DomainError):
        PhysicalConstants(**{field: 0.0})


def test_cg_factor_at_most_one():
    with pytest.raises(DomainError):
        PhysicalConstants(cg_factor_sq=1.5)


@pytest.mark.parametrize("rabi, expected, rel", [
    (0.074, 0.080, 0.05),   # ~80 uW/cm^2 weak-drive point
    (0.35, 1.8, 0.05),      # ~1.8 mW/cm^2 at the 42 % point
])
def test_rabi_to_intensity_reference_points(rabi, expected, rel):
    assert rabi_to_intensity(rabi) == pytest.approx(expected, rel=rel)


def test_rabi_to_intensity_formula():
    # 2 * 0.35^2 * 1.63 / (2/9)
    assert rabi_to_intensity(0.35) == pytest.approx(1.797075, rel=1e-12)
    assert rabi_to_intensity(0.0) == 0.0


def test_intensity_to_rabi():
    assert intensity_to_rabi(1.8) == pytest.approx(0.35, rel=0.01)
    assert intensity_to_rabi(0.0) == 0.0


@pytest.mark.parametrize("x", [0.1, 0.32, 0.67])
def test_round_trip_examples(x):
    assert intensity_to_rabi(rabi_to_intensity(x)) == pytest.approx(x, rel=1e-14)


@given(st.floats(min_value=1e-6, max_value=1e3))
def test_round_trip_identity(intensity):
    back = rabi_to_intensity(intensity_to_rabi(intensity))
    assert back == pytest.approx(intensity, rel=1e-12)


@given(st.floats(min_value=0, max_value=10), st.floats(min_value=0, max_value=10))
def test_conversions_monotone(a, b):
    if a < b:
        assert rabi_to_intensity(a) < rabi_to_intensity(b)
        assert intensity_to_rabi(a) < intensity_to_rabi(b)


def test_negative_inputs_rejected():
    with pytest.raises(DomainError):
        rabi_to_intensity(-0.1)
    with pytest.raises(DomainError):
        intensity_to_rabi(-1.0)


def test_photon_count_reference_point():
    # oracle: E = I T A / (h c / lambda) evaluated directly
    intensity_si = 0.080 * 10.0
    area = 3 * (780.24e-9) ** 2 / (2 * math.pi)
    photon = 6.62607015e-34 * 299792458.0 / 780.24e-9
    expected = intensity_si * 70e-6 * area / photon
    n = photons_per_atomic_cross_section(0.080, 70e-6)
    assert n == pytest.approx(expected, rel=1e-12)
    assert n == pytest.approx(63.93, abs=0.01)
    assert n == pytest.approx(60, rel=0.10)


def test_photon_count_zero_and_linearity():
    assert photons_per_atomic_cross_section(0.0, 70e-6) == 0.0
    one = photons_per_atomic_cross_section(0.08, 70e-6)
    assert photons_per_atomic_cross_section(0.08, 140e-6) == pytest.approx(2 * one, rel=1e-14)


@given(st.floats(min_value=0, max_value=100), st.floats(min_value=1e-9, max_value=1e-2),
       st.floats(min_value=0.1, max_value=10))
def test_photon_count_bilinear(intensity, duration, k):
    base = photons_per_atomic_cross_section(intensity, duration)
    assert photons_per_atomic_cross_section(k * intensity, duration) == pytest.approx(k * base, rel=1e-12, abs=1e-300)
    assert photons_per_atomic_cross_section(intensity, k * duration) == pytest.approx(k * base, rel=1e-12, abs=1e-300)


def test_photon_count_requires_positive_duration():
    with pytest.raises(DomainError):
        photons_per_atomic_cross_section(0.08, 0.0)


def test_atomic_cross_section():
    assert atomic_cross_section() == pytest.approx(2.907e-13, rel=1e-3)


def test_eit_delay_reference_point():
    t_d = eit_delay_time(42, 1.25, 0.32)
    assert t_d == pytest.approx(13.6e-6, rel=0.005)
    assert t_d / 50e-6 == pytest.approx(0.27, abs=0.005)
    assert eit_delay_gamma_units(42, 1.25, 0.32) == pytest.approx(512.6953125)


def test_eit_delay_zero_and_linear():
    assert eit_delay_time(0, 1.25, 0.32) == 0.0
    assert eit_delay_time(84, 1.25, 0.32) == pytest.approx(2 * eit_delay_time(42, 1.25, 0.32))
    with pytest.raises(DomainError):
        eit_delay_time(42, 1.25, 0.0)


def test_microsecond_conversion():
    assert us_to_gamma_time(1.0) == pytest.approx(2 * math.pi * 6.0)


def test_optical_depth():
    unit = MediumSpec(1.0, 1.0, 1.0, 1.0, 1.0)
    assert optical_depth(unit) == 1.0
    medium = MediumSpec(1e17, 1e-13, 1e-13, 2e-14, 4.2e-3)
    assert optical_depth(medium, "probe") == optical_depth(medium, "signal")
    doubled = MediumSpec(2e17, 1e-13, 1e-13, 2e-14, 4.2e-3)
    assert optical_depth(doubled) == pytest.approx(2 * optical_depth(medium))
    with pytest.raises(DomainError):
        optical_depth(medium, "drive")
    with pytest.raises(DomainError):
        MediumSpec(0.0, 1.0, 1.0, 1.0, 1.0)
