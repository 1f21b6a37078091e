#!/usr/bin/env python3
"""
model.py
Parâmetros físicos do pêndulo duplo de hastes e todos os coeficientes
fechados do Lagrangiano/Hamiltoniano, compartilhados pelos módulos
clássico e quântico.

Todas as funções aceitam ângulos escalares ou arrays numpy (broadcast).
Unidades naturais: massas, comprimentos, g e ħ adimensionais.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, replace

import numpy as np


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class PendulumParams:
    m1: float = 1.0
    m2: float = 1.0
    l1: float = 1.0
    l2: float = 1.0
    g: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m1", "m2", "l1", "l2", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} deve ser > 0 (recebido {value!r})")
        if not (math.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g deve ser >= 0 (recebido {self.g!r})")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PendulumParams":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"campos desconhecidos em params: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    def with_changes(self, **changes) -> "PendulumParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class PhaseState:
    theta1: float
    theta2: float
    p1: float
    p2: float

    def wrapped(self) -> "PhaseState":
        return PhaseState(float(wrap_angle(self.theta1)), float(wrap_angle(self.theta2)),
                          self.p1, self.p2)

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2, self.p1, self.p2], dtype=float)

    @classmethod
    def from_array(cls, values) -> "PhaseState":
        t1, t2, p1, p2 = (float(v) for v in values)
        return cls(t1, t2, p1, p2)


@dataclass(frozen=True)
class HamiltonianCoefficients:
    inv2I1: np.ndarray | float
    inv2I2: np.ndarray | float
    invI12: np.ndarray | float
    V: np.ndarray | float


def wrap_angle(theta):
    """Leva ângulos para [−π, π)."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    # mod pode devolver 2π por arredondamento
    return np.where(wrapped >= np.pi, wrapped - 2 * np.pi, wrapped)


# ──────────────────────────────────────────
# Energia potencial e inércias
# ──────────────────────────────────────────

def potential_energy(params: PendulumParams, theta1, theta2):
    s1 = np.sin(np.asarray(theta1, dtype=float) / 2) ** 2
    s2 = np.sin(np.asarray(theta2, dtype=float) / 2) ** 2
    return (2 * params.m1 * params.g * params.l1 * s1
            + 2 * params.m2 * params.g * (params.l1 * s1 + params.l2 * s2))


def _reduced_mass(params: PendulumParams, delta):
    # m1 + m2 sin²Δ, estritamente positivo
    return params.m1 + params.m2 * np.sin(delta) ** 2


def inertia_coefficients(params: PendulumParams, theta1, theta2) -> HamiltonianCoefficients:
    """
    Devolve 1/(2I₁), 1/(2I₂), 1/I₁₂ e V.
    1/I₁₂ usa a forma simplificada −cosΔ/(ℓ₁ℓ₂(m₁+m₂sin²Δ)), sem a
    singularidade removível de sec Δ em Δ = ±π/2.
    """
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    delta = theta1 - theta2
    reduced = _reduced_mass(params, delta)

    inv2I1 = 1.0 / (2 * params.l1 ** 2 * reduced)
    inv2I2 = (params.m1 + params.m2) / (2 * params.m2 * params.l2 ** 2 * reduced)
    invI12 = -np.cos(delta) / (params.l1 * params.l2 * reduced)

    return HamiltonianCoefficients(
        inv2I1=inv2I1,
        inv2I2=inv2I2,
        invI12=invI12,
        V=potential_energy(params, theta1, theta2),
    )


def inertia_literal(params: PendulumParams, theta1, theta2) -> tuple:
    """I₁, I₂, I₁₂ exatamente como escritos (I₁₂ diverge em Δ = ±π/2)."""
    delta = np.asarray(theta1, dtype=float) - np.asarray(theta2, dtype=float)
    I1 = _reduced_mass(params, delta) * params.l1 ** 2
    I2 = params.m2 * params.l2 ** 2 / params.l1 ** 2 / (params.m1 + params.m2) * I1
    with np.errstate(divide="ignore"):
        I12 = (params.m2 * params.l1 * params.l2 * np.cos(delta)
               - (params.m1 + params.m2) * params.l1 * params.l2 / np.cos(delta))
    return I1, I2, I12


def mass_matrix(params: PendulumParams, theta1: float, theta2: float) -> np.ndarray:
    """Matriz de massa M(θ) da forma cinética K = ½ θ̇ᵀ M θ̇."""
    c = params.m2 * params.l1 * params.l2 * math.cos(theta1 - theta2)
    return np.array([
        [(params.m1 + params.m2) * params.l1 ** 2, c],
        [c, params.m2 * params.l2 ** 2],
    ])


# ──────────────────────────────────────────
# Hamiltoniano
# ──────────────────────────────────────────

def kinetic_energy(params: PendulumParams, theta1, theta2, p1, p2):
    coeffs = inertia_coefficients(params, theta1, theta2)
    return (coeffs.inv2I1 * np.square(p1) + coeffs.inv2I2 * np.square(p2)
            + coeffs.invI12 * np.multiply(p1, p2))


def hamiltonian_value(params: PendulumParams, state: PhaseState) -> float:
    coeffs = inertia_coefficients(params, state.theta1, state.theta2)
    kinetic = (coeffs.inv2I1 * state.p1 ** 2 + coeffs.inv2I2 * state.p2 ** 2
               + coeffs.invI12 * state.p1 * state.p2)
    return float(kinetic + coeffs.V)


def hamiltonian_gradient(params: PendulumParams, y: np.ndarray) -> np.ndarray:
    """
    ∂H/∂(θ₁, θ₂, p₁, p₂) com derivadas angulares analíticas.
    `y` tem forma (4,) ou (4, n); o resultado tem a mesma forma.
    """
    theta1, theta2, p1, p2 = y
    delta = theta1 - theta2
    sin_d, cos_d = np.sin(delta), np.cos(delta)
    reduced = _reduced_mass(params, delta)
    d_reduced = 2 * params.m2 * sin_d * cos_d

    a = 1.0 / (2 * params.l1 ** 2 * reduced)
    b = (params.m1 + params.m2) / (2 * params.m2 * params.l2 ** 2 * reduced)
    c = -cos_d / (params.l1 * params.l2 * reduced)

    da = -a * d_reduced / reduced
    db = -b * d_reduced / reduced
    dc = sin_d / (params.l1 * params.l2 * reduced) - c * d_reduced / reduced
    dK = da * p1 ** 2 + db * p2 ** 2 + dc * p1 * p2

    dV1 = (params.m1 + params.m2) * params.g * params.l1 * np.sin(theta1)
    dV2 = params.m2 * params.g * params.l2 * np.sin(theta2)

    return np.array([
        dK + dV1,
        -dK + dV2,
        2 * a * p1 + c * p2,
        2 * b * p2 + c * p1,
    ])


def characteristic_time(params: PendulumParams, ell_eff: float | None = None) -> float:
    """
    Constante de balanço dimensional k = 2π√(ℓ_eff/g), com ℓ_eff = ℓ₁+ℓ₂
    por omissão. Para g = 0 não há escala de tempo e devolve 1.
    """
    ell = params.l1 + params.l2 if ell_eff is None else ell_eff
    if params.g == 0:
        return 1.0
    return 2 * math.pi * math.sqrt(ell / params.g)
