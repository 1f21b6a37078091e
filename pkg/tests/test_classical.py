import math

import numpy as np
import pytest

from scripts.classical import (
    PRESETS, DivergenceSeries, divergence, equations_of_motion, fit_lyapunov, integrate,
    lyapunov_initial_conditions, scrambling_time, sweep_g, to_markdown,
    trajectory_initial_conditions,
)
from scripts.errors import ChaologyWarning, InsufficientData
from scripts.model import PendulumParams, PhaseState, hamiltonian_value


def _synthetic(values, times):
    return DivergenceSeries(times=times, delta_omega=values, delta_omega_paper=values, k=1.0)


class TestEquationsOfMotion:
    def test_stable_equilibrium(self, unit_params):
        rates = equations_of_motion(unit_params, PhaseState(0.0, 0.0, 0.0, 0.0))
        assert rates.as_array() == pytest.approx(np.zeros(4), abs=1e-15)

    def test_inverted_equilibrium(self, unit_params):
        rates = equations_of_motion(unit_params, PhaseState(math.pi, math.pi, 0.0, 0.0))
        assert rates.as_array() == pytest.approx(np.zeros(4), abs=1e-12)

    def test_hamilton_equations(self, rng):
        params = PendulumParams(m1=1.4, l2=0.8, g=3.0)
        y = rng.normal(size=4)
        rates = equations_of_motion(params, PhaseState.from_array(y)).as_array()
        h = 1e-6
        partials = []
        for i in range(4):
            up, down = y.copy(), y.copy()
            up[i] += h
            down[i] -= h
            partials.append((hamiltonian_value(params, PhaseState.from_array(up))
                             - hamiltonian_value(params, PhaseState.from_array(down))) / (2 * h))
        expected = np.array([partials[2], partials[3], -partials[0], -partials[1]])
        assert rates == pytest.approx(expected, abs=1e-6)


class TestIntegrate:
    def test_rest_stays_at_rest(self, unit_params):
        traj = integrate(unit_params, PhaseState(0.0, 0.0, 0.0, 0.0), t_max=5.0, dt=0.1)
        assert np.allclose(traj.states, 0.0)
        assert traj.times.size == 51

    def test_energy_is_conserved(self, unit_params):
        ic, _ = trajectory_initial_conditions()
        traj = integrate(unit_params, ic, t_max=10.0, dt=0.01, tol=1e-8)
        assert traj.energy_drift <= 1e-8
        assert traj.energy[0] == pytest.approx(3.0)

    def test_energy_conserved_without_gravity(self):
        params = PendulumParams(g=0.0)
        traj = integrate(params, PhaseState(0.3, -0.2, 0.5, -0.1), t_max=5.0, dt=0.05)
        assert traj.energy_drift <= 1e-8

    def test_angles_are_wrapped(self, unit_params):
        traj = integrate(unit_params, PhaseState(0.0, 0.0, 4.0, 0.0), t_max=10.0, dt=0.05)
        assert np.all(traj.states[:, :2] >= -math.pi)
        assert np.all(traj.states[:, :2] < math.pi)
        assert np.allclose(np.cos(traj.states[:, :2]), np.cos(traj.lifted))

    def test_time_reversal(self, unit_params):
        ic = PhaseState(1.0, -0.5, 0.2, 0.1)
        forward = integrate(unit_params, ic, t_max=2.0, dt=0.5)
        end = forward.states[-1]
        back = integrate(unit_params, PhaseState(end[0], end[1], -end[2], -end[3]), t_max=2.0, dt=0.5)
        final = back.states[-1]
        assert np.allclose(np.cos(final[:2]), np.cos([1.0, -0.5]), atol=1e-6)
        assert np.allclose(np.sin(final[:2]), np.sin([1.0, -0.5]), atol=1e-6)
        assert final[2:] == pytest.approx([-0.2, -0.1], abs=1e-6)

    def test_rejects_bad_sampling(self, unit_params):
        with pytest.raises(ValueError):
            integrate(unit_params, PhaseState(0.0, 0.0, 0.0, 0.0), t_max=1.0, dt=0.0)


class TestDivergence:
    def test_identical_initial_conditions(self, unit_params):
        ic = PhaseState(0.5, 0.2, 0.0, 0.0)
        series = divergence(unit_params, ic, ic, t_max=2.0, dt=0.1)
        assert np.all(series.delta_omega == 0.0)
        assert np.all(series.delta_omega_paper == 0.0)

    def test_default_k_is_characteristic_time(self, unit_params):
        ic_a, ic_b = lyapunov_initial_conditions()
        series = divergence(unit_params, ic_a, ic_b, t_max=0.5, dt=0.1)
        assert series.k == pytest.approx(2 * math.pi * math.sqrt(2))
        assert series.delta_omega[0] == pytest.approx(1e-6 * math.pi, rel=1e-9)

    def test_linear_regime_scales_with_epsilon(self, unit_params):
        base = PhaseState(0.1, 0.05, 0.0, 0.0)
        one = divergence(unit_params, base, PhaseState(0.1, 0.05 + 1e-9, 0.0, 0.0), t_max=2.0, dt=0.1)
        half = divergence(unit_params, base, PhaseState(0.1, 0.05 + 5e-10, 0.0, 0.0), t_max=2.0, dt=0.1)
        ratio = half.delta_omega / one.delta_omega
        assert np.all(np.abs(ratio - 0.5) < 0.1)


class TestLyapunovFit:
    def test_synthetic_exponential(self):
        t = np.arange(0, 5.0 + 1e-9, 0.01)
        fit = fit_lyapunov(_synthetic(1e-6 * np.exp(2 * t), t), mode="until-order-one")
        assert fit.lambda_L == pytest.approx(2.0, abs=1e-3)
        assert fit.t_star is None
        assert fit.rms < 1e-10

    def test_window_stops_at_order_one(self):
        t = np.arange(0, 10.0 + 1e-9, 0.01)
        values = 1e-6 * np.exp(2 * t)
        order_one = fit_lyapunov(_synthetic(values, t), mode="until-order-one")
        full = fit_lyapunov(_synthetic(values, t), mode="full-window")
        t_star = math.log(1e6) / 2
        assert order_one.t_star == pytest.approx(t_star, abs=1e-3)
        assert order_one.fit_window[1] <= t_star
        assert full.fit_window[1] == pytest.approx(10.0)

    def test_constant_series(self):
        t = np.linspace(0, 5, 100)
        fit = fit_lyapunov(_synthetic(np.full_like(t, 0.5), t))
        assert fit.a2 == pytest.approx(0.0, abs=1e-12)
        assert fit.t_star is None

    def test_too_few_samples(self):
        t = np.linspace(0, 1, 5)
        with pytest.raises(InsufficientData):
            fit_lyapunov(_synthetic(np.exp(t), t))

    def test_unknown_mode(self):
        t = np.linspace(0, 1, 50)
        with pytest.raises(ValueError):
            fit_lyapunov(_synthetic(np.exp(t), t), mode="sliding")

    def test_to_dict(self):
        t = np.linspace(0, 1, 50)
        data = fit_lyapunov(_synthetic(1e-3 * np.exp(t), t)).to_dict()
        assert set(data) == {"a1", "a2", "lambda_L", "t_star", "fit_window", "rms", "mode"}
        assert data["t_star"] is None

    def test_already_above_order_one_uses_full_window(self):
        t = np.linspace(0, 1, 50)
        with pytest.warns(ChaologyWarning, match="janela inteira"):
            fit = fit_lyapunov(_synthetic(np.exp(t), t), mode="until-order-one")
        assert fit.t_star == 0.0
        assert fit.fit_window == (0.0, 1.0)
        assert fit.lambda_L == pytest.approx(1.0, abs=1e-9)
        assert fit.mode == "until-order-one"

    def test_order_one_reached_too_early_uses_full_window(self):
        t = np.linspace(0, 2, 101)
        values = 0.9 * np.exp(3 * t)
        with pytest.warns(ChaologyWarning):
            fit = fit_lyapunov(_synthetic(values, t), mode="until-order-one")
        assert fit.t_star == pytest.approx(math.log(1 / 0.9) / 3, abs=1e-3)
        assert fit.fit_window == (0.0, 2.0)
        assert fit.lambda_L == pytest.approx(3.0, abs=1e-9)


class TestScramblingTime:
    def test_interpolates(self):
        assert scrambling_time(np.array([0.0, 1.0]), np.array([0.5, 1.5])) == pytest.approx(0.5)

    def test_never_reached(self):
        assert scrambling_time(np.array([0.0, 1.0]), np.array([0.1, 0.2])) is None

    def test_already_above(self):
        assert scrambling_time(np.array([2.0, 3.0]), np.array([1.5, 3.0])) == 2.0


class TestSweep:
    def test_single_g_matches_direct_fit(self, unit_params):
        ic_a, ic_b = lyapunov_initial_conditions()
        rows = sweep_g(unit_params, [1.0], t_max=5.0, dt=0.01)
        direct = fit_lyapunov(divergence(unit_params, ic_a, ic_b, t_max=5.0, dt=0.01))
        assert len(rows) == 1
        assert rows[0]["status"] == "ok"
        assert rows[0]["lambda"] == pytest.approx(direct.lambda_L, rel=1e-12)

    def test_rows_sorted_by_g(self, unit_params):
        rows = sweep_g(unit_params, [4.0, 1.0], t_max=2.0, dt=0.01)
        assert [r["g"] for r in rows] == [1.0, 4.0]

    def test_failed_row_does_not_stop_sweep(self, unit_params):
        rows = sweep_g(unit_params, [1.0, 2.0], t_max=0.05, dt=0.01)
        assert [r["status"] for r in rows] == ["error", "error"]
        assert all(r["lambda"] is None for r in rows)
        assert "amostras" in rows[0]["message"]

    def test_empty_list(self, unit_params):
        with pytest.raises(ValueError):
            sweep_g(unit_params, [])

    def test_markdown_lists_rows(self, unit_params):
        rows = sweep_g(unit_params, [1.0], t_max=2.0, dt=0.01)
        text = to_markdown(sweep=rows)
        assert "## Dinâmica Clássica" in text
        assert "| 1 |" in text


class TestReferenceRuns:
    def test_presets(self):
        assert PRESETS["long-upper"].l1 == pytest.approx(4 / 3)
        assert PRESETS["equal-g10"].g == 10.0

    @pytest.mark.slow
    def test_chaotic_pair_scrambles(self, unit_params):
        ic_a, ic_b = lyapunov_initial_conditions()
        series = divergence(unit_params, ic_a, ic_b, t_max=40.0, dt=0.01)
        fit = fit_lyapunov(series)
        assert fit.lambda_L > 0
        assert fit.t_star is not None

    @pytest.mark.slow
    def test_stronger_gravity_scrambles_faster(self, unit_params):
        rows = sweep_g(unit_params, [1.0, 10.0, 100.0], t_max=40.0, dt=0.01)
        assert [r["status"] for r in rows] == ["ok", "ok", "ok"]
        lambdas = [r["lambda"] for r in rows]
        t_stars = [r["t_star"] for r in rows]
        assert all(lam > 0 for lam in lambdas)
        assert lambdas[0] < lambdas[1] < lambdas[2]
        assert None not in t_stars
        assert t_stars[0] > t_stars[1] > t_stars[2]
