import math

import numpy as np
import pytest

from scripts.model import (
    PendulumParams, PhaseState, characteristic_time, hamiltonian_gradient,
    hamiltonian_value, inertia_coefficients, inertia_literal, kinetic_energy,
    mass_matrix, potential_energy, wrap_angle,
)


class TestPendulumParams:
    def test_defaults_are_unit(self):
        p = PendulumParams()
        assert (p.m1, p.m2, p.l1, p.l2, p.g, p.hbar) == (1.0, 1.0, 1.0, 1.0, 1.0, 1.0)

    @pytest.mark.parametrize("field", ["m1", "m2", "l1", "l2", "hbar"])
    def test_non_positive_rejected(self, field):
        with pytest.raises(ValueError):
            PendulumParams(**{field: 0.0})

    def test_negative_gravity_rejected(self):
        with pytest.raises(ValueError):
            PendulumParams(g=-1.0)

    def test_zero_gravity_allowed(self):
        assert PendulumParams(g=0.0).g == 0.0

    def test_from_dict_rejects_unknown_field(self):
        with pytest.raises(ValueError):
            PendulumParams.from_dict({"m1": 1.0, "mass": 2.0})

    def test_dict_round_trip(self):
        p = PendulumParams(m1=2.0, l2=0.5, g=9.8)
        assert PendulumParams.from_dict(p.to_dict()) == p


class TestPotential:
    @pytest.mark.parametrize("theta1, theta2, expected", [
        (0.0, 0.0, 0.0),
        (math.pi, math.pi, 6.0),
        (math.pi / 2, 0.0, 2.0),
    ])
    def test_unit_values(self, unit_params, theta1, theta2, expected):
        assert potential_energy(unit_params, theta1, theta2) == pytest.approx(expected, abs=1e-12)

    def test_non_negative(self, unit_params, rng):
        theta = rng.uniform(-math.pi, math.pi, size=(2, 500))
        assert np.all(potential_energy(unit_params, *theta) >= 0)

    def test_periodic(self, unit_params, rng):
        t1, t2 = rng.uniform(-math.pi, math.pi, size=(2, 50))
        assert np.allclose(potential_energy(unit_params, t1 + 2 * math.pi, t2 - 2 * math.pi),
                           potential_energy(unit_params, t1, t2), atol=1e-12)


class TestInertiaCoefficients:
    def test_aligned_rods(self, unit_params):
        c = inertia_coefficients(unit_params, 0.3, 0.3)
        assert c.inv2I1 == pytest.approx(0.5)
        assert c.inv2I2 == pytest.approx(1.0)
        assert c.invI12 == pytest.approx(-1.0)

    def test_perpendicular_rods(self, unit_params):
        c = inertia_coefficients(unit_params, math.pi / 2, 0.0)
        assert c.inv2I1 == pytest.approx(0.25)
        assert c.invI12 == pytest.approx(0.0, abs=1e-15)
        assert np.isfinite(c.invI12)

    def test_matches_inverse_mass_matrix(self, rng):
        params = PendulumParams(m1=1.3, m2=0.7, l1=1.1, l2=0.6, g=2.0)
        for t1, t2 in rng.uniform(-math.pi, math.pi, size=(20, 2)):
            inv = np.linalg.inv(mass_matrix(params, t1, t2))
            c = inertia_coefficients(params, t1, t2)
            assert c.inv2I1 == pytest.approx(0.5 * inv[0, 0], rel=1e-12)
            assert c.inv2I2 == pytest.approx(0.5 * inv[1, 1], rel=1e-12)
            assert c.invI12 == pytest.approx(inv[0, 1], rel=1e-10, abs=1e-14)

    def test_literal_agrees_away_from_singularity(self, rng):
        params = PendulumParams(m1=2.0, m2=0.5, l1=0.8, l2=1.4)
        t1, t2 = rng.uniform(-math.pi, math.pi, size=(2, 200))
        keep = np.abs(np.cos(t1 - t2)) > 1e-3
        t1, t2 = t1[keep], t2[keep]
        I1, I2, I12 = inertia_literal(params, t1, t2)
        c = inertia_coefficients(params, t1, t2)
        assert np.allclose(1 / (2 * I1), c.inv2I1, rtol=1e-10)
        assert np.allclose(1 / (2 * I2), c.inv2I2, rtol=1e-10)
        assert np.allclose(1 / I12, c.invI12, rtol=1e-8)


class TestHamiltonian:
    def test_kinetic_form_is_positive_definite(self, unit_params, rng):
        t1, t2 = rng.uniform(-math.pi, math.pi, size=(2, 300))
        p1, p2 = rng.normal(size=(2, 300))
        assert np.all(kinetic_energy(unit_params, t1, t2, p1, p2) > 0)

    def test_legendre_transform(self, rng):
        params = PendulumParams(m1=1.5, m2=0.8, l1=1.2, l2=0.9, g=3.0)
        for _ in range(10):
            t1, t2 = rng.uniform(-math.pi, math.pi, size=2)
            omega = rng.normal(size=2)
            m = mass_matrix(params, t1, t2)
            p = m @ omega
            lagrangian_kinetic = 0.5 * omega @ m @ omega
            state = PhaseState(t1, t2, p[0], p[1])
            expected = lagrangian_kinetic + potential_energy(params, t1, t2)
            assert hamiltonian_value(params, state) == pytest.approx(expected, rel=1e-10)

    def test_single_momentum_value(self, unit_params):
        # Δ = 0: ½·p₁² com p₁ = 1
        assert hamiltonian_value(unit_params, PhaseState(0.0, 0.0, 1.0, 0.0)) == pytest.approx(0.5)

    def test_parity_symmetry(self, unit_params, rng):
        t1, t2, p1, p2 = rng.normal(size=4)
        a = hamiltonian_value(unit_params, PhaseState(t1, t2, p1, p2))
        b = hamiltonian_value(unit_params, PhaseState(-t1, -t2, -p1, -p2))
        assert a == pytest.approx(b, rel=1e-13)

    def test_gradient_matches_finite_differences(self, rng):
        params = PendulumParams(m1=1.2, m2=0.9, l1=1.0, l2=0.7, g=2.5)
        y = rng.normal(size=4)
        grad = hamiltonian_gradient(params, y)
        h = 1e-6
        for i in range(4):
            up, down = y.copy(), y.copy()
            up[i] += h
            down[i] -= h
            numeric = (hamiltonian_value(params, PhaseState.from_array(up))
                       - hamiltonian_value(params, PhaseState.from_array(down))) / (2 * h)
            assert grad[i] == pytest.approx(numeric, abs=1e-6)

    def test_gradient_broadcasts(self, unit_params, rng):
        y = rng.normal(size=(4, 7))
        batch = hamiltonian_gradient(unit_params, y)
        assert batch.shape == (4, 7)
        assert np.allclose(batch[:, 3], hamiltonian_gradient(unit_params, y[:, 3]))


class TestHelpers:
    def test_wrap_angle_range(self, rng):
        theta = rng.uniform(-50, 50, size=1000)
        wrapped = wrap_angle(theta)
        assert np.all(wrapped >= -math.pi) and np.all(wrapped < math.pi)
        assert np.allclose(np.cos(wrapped), np.cos(theta))

    def test_wrap_angle_maps_pi_to_minus_pi(self):
        assert float(wrap_angle(math.pi)) == pytest.approx(-math.pi)

    def test_characteristic_time(self):
        assert characteristic_time(PendulumParams()) == pytest.approx(2 * math.pi * math.sqrt(2))
        assert characteristic_time(PendulumParams(), ell_eff=1.0) == pytest.approx(2 * math.pi)

    def test_characteristic_time_without_gravity(self):
        assert characteristic_time(PendulumParams(g=0.0)) == 1.0
