import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heliasdo.errors import ConfigError
from heliasdo.plant import (
    MotorVoltages,
    PlantParams,
    PlantState,
    in_operating_domain,
    plant_deriv,
    saturate,
    voltages_from_u,
)

P = PlantParams()
finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)
domain_angle = st.floats(min_value=-math.pi / 4, max_value=math.pi / 4)


def test_defaults_are_table_values():
    assert (P.J_alpha, P.J_beta, P.L_a, P.L_h) == (1.0348, 0.0451, 0.66, 0.178)
    assert (P.m_e, P.g, P.K_f, P.V_max) == (0.094, 9.81, 0.1188, 24.0)
    with pytest.raises(ConfigError):
        PlantParams(J_alpha=0.0)


def test_gravity_balance():
    d = plant_deriv(PlantState(), 0.92214, 0.0, 0.0, 0.0, P)
    assert d.x2 == pytest.approx(0.0, abs=1e-6)
    assert d.x4 == 0.0


def test_free_fall_acceleration():
    d = plant_deriv(PlantState(), 0.0, 0.0, 0.0, 0.0, P)
    assert d.x2 == pytest.approx(-0.5881449555469657, rel=1e-12)


def test_pitch_input_gain():
    d = plant_deriv(PlantState(0.3, 0.1, 0.2, -0.4), 0.0, 1.0, 0.0, 0.0, P)
    assert d.x4 == pytest.approx(3.946784922394678, rel=1e-12)
    assert d.x1 == 0.1 and d.x3 == -0.4


@given(finite, finite, domain_angle, finite)
def test_plant_is_affine_in_inputs(x1, x2, x3, x4):
    s = PlantState(x1, x2, x3, x4)
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=4), rng.normal(size=4)
    base = np.array(plant_deriv(s, 0, 0, 0, 0, P))
    fa = np.array(plant_deriv(s, *a, P)) - base
    fb = np.array(plant_deriv(s, *b, P)) - base
    fab = np.array(plant_deriv(s, *(2 * a - 3 * b), P)) - base
    np.testing.assert_allclose(fab, 2 * fa - 3 * fb, atol=1e-12)


@given(domain_angle, domain_angle)
def test_equilibrium_input_cancels_gravity(x1, x3):
    u1 = P.m_e * P.g * math.cos(x1) / math.cos(x3)
    assert plant_deriv(PlantState(x1, 0, x3, 0), u1, 0, 0, 0, P).x2 == pytest.approx(0.0, abs=1e-12)


def test_voltage_map_examples():
    v = voltages_from_u(0.92214, 0.0, P)
    assert v.V_f == v.V_b == pytest.approx(3.8810606060606063, rel=1e-12)
    assert voltages_from_u(0.0, 0.0, P) == (0.0, 0.0)
    assert voltages_from_u(2 * P.K_f, 0.0, P) == pytest.approx((1.0, 1.0))


def test_saturate_examples():
    v, u1, u2, sat = saturate(MotorVoltages(30.0, -30.0), P)
    assert v == (24.0, -24.0) and sat
    assert u1 == 0.0 and u2 == pytest.approx(P.K_f * 48.0)
    v, _, _, sat = saturate(MotorVoltages(3.881, 3.881), P)
    assert v == (3.881, 3.881) and not sat
    assert saturate(MotorVoltages(0.0, 0.0), P) == ((0.0, 0.0), 0.0, 0.0, False)


@given(st.floats(min_value=-2.5, max_value=2.5), st.floats(min_value=-2.5, max_value=2.5))
def test_round_trip_inside_limits(u1, u2):
    _, r1, r2, sat = saturate(voltages_from_u(u1, u2, P), P)
    assert not sat
    assert r1 == pytest.approx(u1, rel=1e-12, abs=1e-15)
    assert r2 == pytest.approx(u2, rel=1e-12, abs=1e-15)


def test_operating_domain():
    assert in_operating_domain(0.0) and in_operating_domain(math.pi / 4 - 1e-9)
    assert not in_operating_domain(0.8)


def test_unforced_motion_is_a_gravity_pendulum():
    scipy_integrate = pytest.importorskip("scipy.integrate")
    c = P.gravity_coeff
    # oracle: adaptive RK45 on the pendulum equation written independently
    sol = scipy_integrate.solve_ivp(lambda t, y: [y[1], -c * math.cos(y[0])], (0, 2.0),
                                    [0.3, 0.0], rtol=1e-10, atol=1e-12)
    s = PlantState(0.3, 0.0, 0.1, -0.02)
    h = 1e-5
    for _ in range(200000):
        d = plant_deriv(s, 0.0, 0.0, 0.0, 0.0, P)
        s = PlantState(*(a + h * b for a, b in zip(s, d)))
    assert s.x1 == pytest.approx(sol.y[0, -1], abs=1e-4)
    assert s.x4 == -0.02
    assert s.x3 == pytest.approx(0.1 - 0.02 * 2.0, abs=1e-9)
