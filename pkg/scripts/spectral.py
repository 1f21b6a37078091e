#!/usr/bin/env python3
"""
spectral.py
Hamiltoniano quântico discreto: grade periódica uniforme em (θ₁, θ₂),
matrizes de diferenciação de Toeplitz, montagem por produto tensorial
e simetrização ½(F·M + M·F) de cada termo cinético.

Índice estendido: k = i·N₂ + j (θ₁ lento, θ₂ rápido).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from scripts.errors import DimensionOverflow
from scripts.model import PendulumParams, inertia_coefficients, potential_energy

STENCILS = ("fourier", "paper")

# Matrizes densas vivas durante um eigensolve: H, autovetores e workspace do LAPACK
_DENSE_COPIES = 3


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class Grid2D:
    n1: int
    n2: int
    theta1_points: np.ndarray
    theta2_points: np.ndarray

    @property
    def dim(self) -> int:
        return self.n1 * self.n2

    @property
    def weight(self) -> float:
        # eixo com um único ponto (modo de pêndulo simples) não entra na quadratura
        h1 = 2 * math.pi / self.n1 if self.n1 > 1 else 1.0
        h2 = 2 * math.pi / self.n2 if self.n2 > 1 else 1.0
        return h1 * h2

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """θ₁ e θ₂ achatados na ordem do índice estendido."""
        t1, t2 = np.meshgrid(self.theta1_points, self.theta2_points, indexing="ij")
        return t1.ravel(), t2.ravel()

    def branch_angles(self) -> tuple[np.ndarray, np.ndarray]:
        """
        θ₁ e θ₂ como operadores de multiplicação, na ordem do índice estendido.
        O nó −π fica sobre o salto do ramo e recebe o ponto médio 0, de modo que
        θ → −θ vale exatamente sob `parity_permutation`.
        """
        points = []
        for values, n in ((self.theta1_points, self.n1), (self.theta2_points, self.n2)):
            values = np.array(values, dtype=float)
            if n > 1:
                values[0] = 0.0
            points.append(values)
        t1, t2 = np.meshgrid(points[0], points[1], indexing="ij")
        return t1.ravel(), t2.ravel()

    def to_dict(self) -> dict:
        return {"n1": self.n1, "n2": self.n2}


@dataclass(frozen=True)
class DiffOps:
    d1: np.ndarray     # primeira derivada, antissimétrica
    dd1: np.ndarray    # segunda derivada, simétrica
    stencil: str = "fourier"


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray
    grid: Grid2D
    params: PendulumParams
    stencil: str = "fourier"
    kind: str = "double"

    @property
    def dim(self) -> int:
        return self.grid.dim


def make_grid(n1: int, n2: int) -> Grid2D:
    """Amostras uniformes de [−π, π) sem o ponto final duplicado."""
    if n1 < 1 or n2 < 1:
        raise ValueError("grade precisa de ao menos um ponto por eixo")
    return Grid2D(
        n1=n1,
        n2=n2,
        theta1_points=-math.pi + 2 * math.pi * np.arange(n1) / n1,
        theta2_points=-math.pi + 2 * math.pi * np.arange(n2) / n2 if n2 > 1 else np.zeros(1),
    )


# ──────────────────────────────────────────
# Operadores de diferenciação
# ──────────────────────────────────────────

def _fourier_entries(n: int) -> tuple[np.ndarray, np.ndarray, float]:
    m = np.arange(1, n)
    half = m * math.pi / n
    sign = (-1.0) ** m
    if n % 2 == 0:
        with np.errstate(divide="ignore"):
            first = 0.5 * sign * np.cos(half) / np.sin(half)
        first[2 * m == n] = 0.0
        second = -sign / (2 * np.sin(half) ** 2)
        diag = -n ** 2 / 12 - 1 / 6
    else:
        first = 0.5 * sign / np.sin(half)
        second = -0.5 * sign * np.cos(half) / np.sin(half) ** 2
        diag = -n ** 2 / 12 + 1 / 12
    return first, second, diag


def _paper_entries(n: int) -> tuple[np.ndarray, np.ndarray, float]:
    m = np.arange(1, n)
    arg = m * math.pi / (n + 1)
    sign = (-1.0) ** m
    first = 0.5 * sign * np.cos(arg) / np.sin(arg)
    first[2 * m == n + 1] = 0.0
    second = -sign / (2 * np.sin(arg) ** 2)
    return first, second, -n ** 2 / 12 - 1 / 6


def build_diff_ops(n: int, stencil: str = "fourier") -> DiffOps:
    """
    `fourier` (padrão): derivadas de colocação periódica (denominadores N),
    exatas para polinômios trigonométricos da grade. Diagonal de dd1:
    −N²/12 − 1/6 (N par) ou −N²/12 + 1/12 (N ímpar); N=3 dá −2/3.
    `paper`: entradas literais com denominadores N+1; a primeira linha de
    d1 é c_m = (−1)^m/2·cot(mπ/(N+1)) e a diagonal de dd1 é sempre
    −N²/12 − 1/6 (N=3 dá −11/12).
    Os dois stencils produzem espectros diferentes na mesma grade; o cache
    inclui o stencil na chave.
    """
    if n < 3:
        raise ValueError("build_diff_ops requer n >= 3")
    if stencil == "fourier":
        first, second, diag = _fourier_entries(n)
        # coluna = s(m h); a linha é o negativo
        column = np.concatenate([[0.0], first])
        d1 = toeplitz(column, -column)
    elif stencil == "paper":
        first, second, diag = _paper_entries(n)
        row = np.concatenate([[0.0], first])
        d1 = toeplitz(-row, row)
    else:
        raise ValueError(f"stencil desconhecido: {stencil} (use {STENCILS})")
    dd_row = np.concatenate([[diag], second])
    return DiffOps(d1=d1, dd1=toeplitz(dd_row), stencil=stencil)


def _axis_ops(n: int, stencil: str) -> DiffOps:
    if n == 1:
        return DiffOps(d1=np.zeros((1, 1)), dd1=np.zeros((1, 1)), stencil=stencil)
    return build_diff_ops(n, stencil)


def apply_derivative(matrix: np.ndarray, vectors: np.ndarray, grid: Grid2D, axis: int) -> np.ndarray:
    """Aplica `matrix` (N×N) ao longo do eixo θ₁ (axis=0) ou θ₂ (axis=1)."""
    flat = vectors.ndim == 1
    cols = vectors.reshape(grid.n1, grid.n2, -1)
    if axis == 0:
        out = (matrix @ cols.reshape(grid.n1, -1)).reshape(cols.shape)
    else:
        out = np.matmul(matrix, cols)
    out = out.reshape(grid.dim, -1)
    return out[:, 0] if flat else out


def parity_permutation(grid: Grid2D) -> np.ndarray:
    """Índices da permutação (θ₁, θ₂) → (−θ₁, −θ₂) mod 2π."""
    i = (-np.arange(grid.n1)) % grid.n1
    j = (-np.arange(grid.n2)) % grid.n2
    return (i[:, None] * grid.n2 + j[None, :]).ravel()


# ──────────────────────────────────────────
# Montagem
# ──────────────────────────────────────────

def required_bytes(dim: int) -> int:
    return _DENSE_COPIES * dim * dim * 8


def _check_budget(dim: int, memory_budget: int | None):
    if memory_budget is None:
        from scripts.config import memory_budget_bytes
        memory_budget = memory_budget_bytes()
    needed = required_bytes(dim)
    if needed > memory_budget:
        raise DimensionOverflow(
            f"dim={dim} precisa de ~{needed / 1e9:.2f} GB; orçamento {memory_budget / 1e9:.2f} GB"
        )


def _add_symmetrized(block: np.ndarray, coeff: np.ndarray, op: np.ndarray):
    # ½(F·M + M·F) com F diagonal: entrada (a, b) = ½(F_a + F_b)·M_ab
    block += 0.5 * (coeff[:, None] + coeff[None, :]) * op


def assemble_hamiltonian(params: PendulumParams, grid: Grid2D, stencil: str = "fourier",
                         memory_budget: int | None = None) -> HamiltonianMatrix:
    """
    H = Σ ½(F·M + M·F) + V com
    F ∈ {−ħ²/(2I₁), −ħ²/(2I₂), −ħ²/I₁₂} e M ∈ {𝔻₁⊗𝕀, 𝕀⊗𝔻₂, D₁⊗D₂}.
    Simétrica por construção (não simetrizada depois do arredondamento).
    """
    if grid.n1 < 3 or grid.n2 < 3:
        raise ValueError("grade do pêndulo duplo precisa de n1, n2 >= 3")
    _check_budget(grid.dim, memory_budget)

    ops1 = build_diff_ops(grid.n1, stencil)
    ops2 = build_diff_ops(grid.n2, stencil)
    t1, t2 = grid.mesh()
    coeffs = inertia_coefficients(params, t1, t2)
    hbar2 = params.hbar ** 2
    f1 = (-hbar2 * coeffs.inv2I1).reshape(grid.n1, grid.n2)
    f2 = (-hbar2 * coeffs.inv2I2).reshape(grid.n1, grid.n2)
    f12 = (-hbar2 * coeffs.invI12).reshape(grid.n1, grid.n2)

    h = np.zeros((grid.dim, grid.dim))
    h4 = h.reshape(grid.n1, grid.n2, grid.n1, grid.n2)

    # 𝔻₁⊗𝕀: acopla (i, j) com (i', j)
    for j in range(grid.n2):
        _add_symmetrized(h4[:, j, :, j], f1[:, j], ops1.dd1)
    # 𝕀⊗𝔻₂: acopla (i, j) com (i, j')
    for i in range(grid.n1):
        _add_symmetrized(h4[i, :, i, :], f2[i, :], ops2.dd1)
    # D₁⊗D₂: denso, uma linha-bloco i por vez
    for i in range(grid.n1):
        pair = 0.5 * (f12[i, :][:, None, None] + f12[None, :, :])
        h4[i] += pair * ops1.d1[i][None, :, None] * ops2.d1[:, None, :]

    h[np.diag_indices(grid.dim)] += coeffs.V
    return HamiltonianMatrix(entries=h, grid=grid, params=params, stencil=stencil)


def assemble_single_pendulum(params: PendulumParams, n: int, stencil: str = "fourier",
                             memory_budget: int | None = None) -> HamiltonianMatrix:
    """
    Variante com θ₂ ≡ 0 congelado: H = −ħ²/(2(m₁+m₂)ℓ₁²)∂² + 2(m₁+m₂)gℓ₁sin²(θ/2).
    A grade resultante tem n2 = 1.
    """
    grid = make_grid(n, 1)
    _check_budget(grid.dim, memory_budget)
    ops = build_diff_ops(n, stencil)
    inertia = (params.m1 + params.m2) * params.l1 ** 2
    theta = grid.theta1_points
    h = -params.hbar ** 2 / (2 * inertia) * ops.dd1
    h[np.diag_indices(n)] += potential_energy(params, theta, 0.0)
    return HamiltonianMatrix(entries=h, grid=grid, params=params, stencil=stencil, kind="single")


def axis_ops(grid: Grid2D, stencil: str = "fourier") -> tuple[DiffOps, DiffOps]:
    """Operadores por eixo coerentes com o stencil usado na montagem."""
    return _axis_ops(grid.n1, stencil), _axis_ops(grid.n2, stencil)
