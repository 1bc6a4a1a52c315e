import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gravlg.errors import (
    EquatorialAxisRequired,
    InvalidSetup,
    MissingDensity,
    NegativeCoupling,
    NonUnitAxis,
)
from gravlg.model import (
    G_NEWTON,
    HBAR,
    K_BOLTZMANN,
    SIGN_PAIRS,
    ModelParams,
    PhysicalSetup,
    QuasiResult,
    Squeezed,
    Thermal,
    dimensionless_from_si,
    reference_setup,
    validate,
)


def test_codata_constants():
    assert G_NEWTON == 6.6743e-11
    assert HBAR == 1.054571817e-34
    assert K_BOLTZMANN == 1.380649e-23


def test_default_axis_follows_phi():
    p = validate(ModelParams(0.1, phi=math.pi / 3))
    assert np.allclose(p.axis, (0.5, math.sqrt(3) / 2, 0.0))


def test_equatorial_axis_sets_phi():
    p = validate(ModelParams(0.1, axis=(0.0, 1.0, 0.0)), closed_form=True)
    assert p.phi == pytest.approx(math.pi / 2)


def test_negative_coupling_rejected():
    with pytest.raises(NegativeCoupling):
        validate(ModelParams(-0.1))
    with pytest.raises(NegativeCoupling):
        ModelParams.from_lambda2(-1e-3)


def test_non_unit_axis_rejected():
    with pytest.raises(NonUnitAxis):
        validate(ModelParams(0.1, axis=(1.0, 1.0, 0.0)))


def test_axis_renormalized_within_tolerance():
    p = validate(ModelParams(0.1, axis=(1.0 + 5e-13, 0.0, 0.0)))
    assert np.linalg.norm(p.axis) == pytest.approx(1.0, abs=1e-15)


def test_polar_axis_only_for_oracle():
    axis = (0.6, 0.0, 0.8)
    assert validate(ModelParams(0.1, axis=axis)).axis[2] == pytest.approx(0.8)
    with pytest.raises(EquatorialAxisRequired):
        validate(ModelParams(0.1, axis=axis), closed_form=True)


def test_bad_omega():
    with pytest.raises(InvalidSetup):
        validate(ModelParams(0.1, omega=0.0))


def test_state_parameters_checked():
    with pytest.raises(InvalidSetup):
        Thermal(-1.0)
    with pytest.raises(InvalidSetup):
        Squeezed(-0.5)


def test_real_squeezing_sign():
    assert Squeezed.real(-5.0).zeta == pytest.approx(-5.0)
    assert Squeezed.real(5.0).zeta == 5.0
    assert Squeezed.from_complex(2j).theta == pytest.approx(math.pi / 2)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_from_moments_satisfies_marginals(e1, e2, c):
    res = QuasiResult.from_moments(e1, e2, c, 0.0, 1.0)
    assert max(res.marginal_defects().values()) < 1e-15
    assert set(res.q) == set(SIGN_PAIRS)


def test_setup_needs_exactly_one_of_mass_or_density():
    with pytest.raises(InvalidSetup):
        PhysicalSetup(m=1e-25, ell=1e-3, omega_si=1.0)
    with pytest.raises(InvalidSetup):
        PhysicalSetup(m=1e-25, ell=1e-3, omega_si=1.0, M=1.0, rho=1.0)
    with pytest.raises(InvalidSetup):
        PhysicalSetup(m=-1.0, ell=1e-3, omega_si=1.0, M=1.0)


def test_sphere_mass_from_density():
    s = reference_setup()
    assert s.oscillator_mass == pytest.approx(4 * math.pi * 20e3 * 1e-9 / 3)
    assert s.separation == s.ell


def test_approximate_form_needs_density():
    s = PhysicalSetup(m=1e-25, ell=1e-3, omega_si=1.0, M=1e-3)
    with pytest.raises(MissingDensity):
        dimensionless_from_si(s, approximate=True)
    assert dimensionless_from_si(s).lambda_sq_approx is None


def test_nbar_convention():
    # kB T / (2 hbar omega), not the Bose-Einstein occupation
    s = reference_setup()
    est = dimensionless_from_si(s)
    assert est.nbar == pytest.approx(K_BOLTZMANN * 300 / (2 * HBAR * s.omega_si), rel=1e-15)


def test_exact_form_close_to_approximate_at_reference():
    # L = ell, sphere of radius ell: ratio (4 pi / 3) / (2 * 1.25^3)
    est = dimensionless_from_si(reference_setup(), approximate=True)
    direct = G_NEWTON**2 * (2.2e-25) ** 2 * (4 * math.pi * 20e3 * 1e-9 / 3) * 1e-6 / (
        2 * (2 * math.pi / 10) ** 3 * HBAR * (1.25e-6) ** 3)
    assert est.lambda_sq == pytest.approx(direct, rel=1e-14)
    assert est.lambda_sq / est.lambda_sq_approx == pytest.approx((4 * math.pi / 3) / (2 * 1.25**3), rel=1e-12)


def test_scaling_in_particle_mass():
    a = dimensionless_from_si(reference_setup(), approximate=True)
    b = dimensionless_from_si(reference_setup(m=2 * 2.2e-25), approximate=True)
    assert b.lambda_sq / a.lambda_sq == pytest.approx(4, rel=1e-12)
    assert b.lambda_sq_approx / a.lambda_sq_approx == pytest.approx(4, rel=1e-12)


def test_scaling_in_frequency():
    w = 2 * math.pi / 10
    a = dimensionless_from_si(reference_setup(), approximate=True)
    b = dimensionless_from_si(reference_setup(omega_si=2 * w), approximate=True)
    assert a.lambda_sq_approx / b.lambda_sq_approx == pytest.approx(8, rel=1e-12)
    assert a.nbar_lambda_sq / b.nbar_lambda_sq == pytest.approx(16, rel=1e-12)
