import math

import numpy as np
import pytest

from scripts.errors import DimensionOverflow
from scripts.model import PendulumParams, potential_energy
from scripts.spectral import (
    apply_derivative, assemble_hamiltonian, assemble_single_pendulum, axis_ops,
    build_diff_ops, make_grid, parity_permutation, required_bytes,
)


class TestGrid:
    def test_uniform_without_endpoint(self):
        grid = make_grid(8, 6)
        assert grid.theta1_points[0] == pytest.approx(-math.pi)
        assert grid.theta1_points[-1] < math.pi
        assert np.allclose(np.diff(grid.theta1_points), 2 * math.pi / 8)
        assert np.allclose(np.diff(grid.theta2_points), 2 * math.pi / 6)

    def test_dim_and_weight(self):
        grid = make_grid(8, 6)
        assert grid.dim == 48
        assert grid.weight == pytest.approx((2 * math.pi / 8) * (2 * math.pi / 6))

    def test_mesh_is_row_major(self):
        grid = make_grid(3, 4)
        t1, t2 = grid.mesh()
        k = 1 * 4 + 2
        assert t1[k] == grid.theta1_points[1]
        assert t2[k] == grid.theta2_points[2]

    def test_parity_permutation_is_involution(self):
        perm = parity_permutation(make_grid(7, 10))
        assert np.array_equal(perm[perm], np.arange(70))

    @pytest.mark.parametrize("n1, n2", [(8, 6), (7, 10), (9, 1)])
    def test_branch_angles_are_odd(self, n1, n2):
        grid = make_grid(n1, n2)
        perm = parity_permutation(grid)
        theta1, theta2 = grid.branch_angles()
        assert theta1[0] == 0.0
        assert np.allclose(theta1[perm], -theta1, atol=1e-14)
        assert np.allclose(theta2[perm], -theta2, atol=1e-14)
        # fora do nó −π coincidem com a malha
        assert np.array_equal(theta1[theta1 != 0], grid.mesh()[0][theta1 != 0])


class TestDiffOps:
    @pytest.mark.parametrize("stencil", ["fourier", "paper"])
    @pytest.mark.parametrize("n", [3, 8, 11])
    def test_exact_symmetries(self, n, stencil):
        ops = build_diff_ops(n, stencil)
        assert np.array_equal(ops.d1, -ops.d1.T)
        assert np.array_equal(ops.dd1, ops.dd1.T)
        assert np.all(np.diag(ops.d1) == 0)

    def test_paper_stencil_small(self):
        ops = build_diff_ops(3, "paper")
        assert ops.d1[0, 1] == pytest.approx(-0.5 * (1 / math.tan(math.pi / 4)))
        assert ops.d1[0, 2] == 0.0
        assert np.allclose(np.diag(ops.dd1), -9 / 12 - 1 / 6)

    def test_small_odd_diagonals_differ(self):
        assert np.allclose(np.diag(build_diff_ops(3, "fourier").dd1), -2 / 3)
        assert np.allclose(np.diag(build_diff_ops(3, "paper").dd1), -11 / 12)

    def test_fourier_diagonal_even(self):
        ops = build_diff_ops(64)
        assert np.allclose(np.diag(ops.dd1), -64 ** 2 / 12 - 1 / 6)

    @pytest.mark.parametrize("n", [64, 63])
    def test_spectral_accuracy(self, n):
        theta = -math.pi + 2 * math.pi * np.arange(n) / n
        ops = build_diff_ops(n)
        assert np.max(np.abs(ops.d1 @ np.sin(theta) - np.cos(theta))) < 1e-8
        assert np.max(np.abs(ops.dd1 @ np.sin(theta) + np.sin(theta))) < 1e-8

    def test_annihilates_constants(self):
        ops = build_diff_ops(32)
        ones = np.ones(32)
        assert np.max(np.abs(ops.d1 @ ones)) < 1e-10
        assert np.max(np.abs(ops.dd1 @ ones)) < 1e-9

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            build_diff_ops(2)

    def test_rejects_unknown_stencil(self):
        with pytest.raises(ValueError):
            build_diff_ops(8, "chebyshev")

    def test_axis_ops_single_point(self):
        ops1, ops2 = axis_ops(make_grid(8, 1))
        assert ops1.d1.shape == (8, 8)
        assert np.array_equal(ops2.dd1, np.zeros((1, 1)))

    def test_apply_derivative_axes(self):
        grid = make_grid(16, 12)
        t1, t2 = grid.mesh()
        f = np.sin(t1) * np.cos(t2)
        ops1, ops2 = axis_ops(grid)
        assert np.allclose(apply_derivative(ops1.d1, f, grid, axis=0), np.cos(t1) * np.cos(t2), atol=1e-10)
        assert np.allclose(apply_derivative(ops2.d1, f, grid, axis=1), -np.sin(t1) * np.sin(t2), atol=1e-10)

    def test_apply_derivative_batches_columns(self):
        grid = make_grid(8, 8)
        t1, _ = grid.mesh()
        block = np.stack([np.sin(t1), np.cos(t1)], axis=1)
        out = apply_derivative(build_diff_ops(8).d1, block, grid, axis=0)
        assert out.shape == (64, 2)
        assert np.allclose(out[:, 0], apply_derivative(build_diff_ops(8).d1, np.sin(t1), grid, 0))


class TestAssembly:
    @pytest.mark.parametrize("stencil", ["fourier", "paper"])
    def test_exactly_symmetric(self, stencil):
        h = assemble_hamiltonian(PendulumParams(m1=1.3, l2=0.7, g=2.0), make_grid(8, 8), stencil)
        assert np.max(np.abs(h.entries - h.entries.T)) == 0.0
        assert h.dim == 64

    def test_parity_commutes(self):
        grid = make_grid(10, 12)
        h = assemble_hamiltonian(PendulumParams(), grid).entries
        perm = parity_permutation(grid)
        assert np.max(np.abs(h[np.ix_(perm, perm)] - h)) <= 1e-10 * np.max(np.abs(h))

    def test_rayleigh_quotient_of_constant(self):
        grid = make_grid(32, 32)
        params = PendulumParams(g=2.0)
        h = assemble_hamiltonian(params, grid).entries
        ones = np.ones(grid.dim)
        t1, t2 = grid.mesh()
        mean_v = potential_energy(params, t1, t2).mean()
        assert ones @ h @ ones / grid.dim == pytest.approx(mean_v, abs=1e-8)

    def test_single_pendulum_free_rotor(self):
        params = PendulumParams(g=0.0)
        h = assemble_single_pendulum(params, 32)
        values = np.linalg.eigvalsh(h.entries)
        # ħ²k²/(2(m₁+m₂)ℓ₁²) com momento de inércia 2
        assert values[:5] == pytest.approx([0.0, 0.25, 0.25, 1.0, 1.0], abs=1e-9)
        assert h.grid.n2 == 1

    def test_memory_budget(self):
        with pytest.raises(DimensionOverflow):
            assemble_hamiltonian(PendulumParams(), make_grid(10, 10), memory_budget=1000)

    def test_memory_budget_from_environment(self, monkeypatch):
        monkeypatch.setenv("CHAOLOGY_MEMORY_BUDGET_GB", "1e-6")
        with pytest.raises(DimensionOverflow):
            assemble_hamiltonian(PendulumParams(), make_grid(20, 20))

    def test_required_bytes(self):
        assert required_bytes(100) == 3 * 100 * 100 * 8

    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError):
            assemble_hamiltonian(PendulumParams(), make_grid(2, 8))
