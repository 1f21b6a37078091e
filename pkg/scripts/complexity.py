#!/usr/bin/env python3
"""
complexity.py
Complexidade por matriz de covariância: referência = estado fundamental de H,
alvo = e^{iH′t}e^{−iHt}|Ψ₀⟩ com H′ de hastes perturbadas, e
𝒞 = √Tr[(log Δ)²]/(2√2), Δ = G_T·G_R⁻¹.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from scripts.errors import (
    ChaologyWarning, GridMismatch, InsufficientData, NonPositiveDelta, SingularReference,
)
from scripts.model import PendulumParams, characteristic_time
from scripts.spectral import Grid2D, apply_derivative, axis_ops

XI_SCALINGS  = ("angles", "balanced")
MODES        = ("double", "single")
MAX_COND     = 1e12
NORM_TOL     = 1e-8
MIN_R2       = 0.95


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class ComplexityConfig:
    epsilon: float = 1e-6
    ell_eff: float | None = None       # None → ℓ₁+ℓ₂
    k: float | None = None             # None → 2π√(ℓ_eff/g)
    M: int | None = None               # truncação da base de H′ (None → completa)
    centered: bool = False
    xi_scaling: str = "angles"         # angles: {θ, kp} · balanced: {θ/k, kp}
    mode: str = "double"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon deve ser > 0")
        if self.k is not None and not self.k > 0:
            raise ValueError("k deve ser > 0")
        if self.ell_eff is not None and not self.ell_eff > 0:
            raise ValueError("ell_eff deve ser > 0")
        if self.xi_scaling not in XI_SCALINGS:
            raise ValueError(f"xi_scaling desconhecido: {self.xi_scaling} (use {XI_SCALINGS})")
        if self.mode not in MODES:
            raise ValueError(f"mode desconhecido: {self.mode} (use {MODES})")

    def balancing(self, params: PendulumParams) -> float:
        return self.k if self.k is not None else characteristic_time(params, self.ell_eff)


@dataclass(frozen=True)
class CovarianceMatrix:
    matrix: np.ndarray          # (d, d) real simétrica, d = 4 (ou 2 no pêndulo simples)
    means: np.ndarray           # ⟨ξ⟩
    labels: tuple

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.matrix))


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    window: tuple

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r2": self.r2, "window": list(self.window)}


@dataclass
class ComplexitySeries:
    times: np.ndarray
    C: np.ndarray
    linear_fit: LinearFit | None
    k: float
    epsilon: float
    ell_eff: float
    reference_condition: float = 0.0
    min_delta: float = 0.0
    max_norm_loss: float = 0.0
    gaussianity_deficit: float = 0.0
    flags: list[str] = field(default_factory=list)

    @property
    def linear_growth(self) -> bool:
        """Crescimento linear tardio: reta da última metade com R² > 0.95 e inclinação > 0."""
        fit = self.linear_fit
        return fit is not None and fit.r2 > MIN_R2 and fit.slope > 0

    def report(self, g: float) -> dict:
        fit = self.linear_fit.to_dict() if self.linear_fit else {}
        return {**fit, "epsilon": self.epsilon, "k": self.k, "ell_eff": self.ell_eff, "g": g,
                "linear_growth": self.linear_growth}


# ──────────────────────────────────────────
# Hamiltoniano perturbado e estado alvo
# ──────────────────────────────────────────

def perturbed_hamiltonian(params: PendulumParams, epsilon: float) -> PendulumParams:
    """ℓ₁ → (1+ε)ℓ₁, ℓ₂ → (1−ε)ℓ₂."""
    if not 0 <= epsilon < 1:
        raise ValueError(f"epsilon deve estar em [0, 1) (recebido {epsilon})")
    return params.with_changes(l1=params.l1 * (1 + epsilon), l2=params.l2 * (1 - epsilon))


def _check_same_grid(a, b):
    if (a.grid.n1, a.grid.n2) != (b.grid.n1, b.grid.n2) or a.stencil != b.stencil or a.kind != b.kind:
        raise GridMismatch(
            f"grades incompatíveis: {a.grid.n1}×{a.grid.n2}/{a.stencil}/{a.kind} "
            f"vs {b.grid.n1}×{b.grid.n2}/{b.stencil}/{b.kind}"
        )


def target_state(eigH, eigHprime, t: float, state: np.ndarray | None = None,
                 M: int | None = None) -> np.ndarray:
    """
    e^{iH′t}e^{−iHt}|ψ⟩ na base da grade; |ψ⟩ = Ψ₀ de H por omissão.
    Em t = 0 devolve o próprio estado, sem passar pelas bases.
    """
    _check_same_grid(eigH, eigHprime)
    psi = eigH.eigenvectors[:, 0] if state is None else np.asarray(state)
    psi = psi.astype(complex)
    if t == 0:
        return psi

    w = eigH.weight
    basis = eigH.eigenvectors
    coeffs = w * (basis.T @ psi) * np.exp(-1j * eigH.eigenvalues * t)
    evolved = basis @ coeffs

    limit = eigHprime.count if M is None else min(M, eigHprime.count)
    basis_p = eigHprime.eigenvectors[:, :limit]
    coeffs_p = w * (basis_p.T @ evolved) * np.exp(1j * eigHprime.eigenvalues[:limit] * t)
    return basis_p @ coeffs_p


def state_norm(state: np.ndarray, grid: Grid2D) -> float:
    return float(math.sqrt(grid.weight * np.vdot(state, state).real))


# ──────────────────────────────────────────
# Covariância e 𝒞
# ──────────────────────────────────────────

def _xi_operators(grid: Grid2D, hbar: float, stencil: str) -> list[tuple[str, object]]:
    """(rótulo, ação) de θᵢ multiplicativo (0 no nó −π) e pᵢ = −iħDᵢ sobre vetores da grade."""
    theta1, theta2 = grid.branch_angles()
    ops1, ops2 = axis_ops(grid, stencil)
    xi = [("theta1", lambda v: theta1 * v)]
    if grid.n2 > 1:
        xi.append(("theta2", lambda v: theta2 * v))
    xi.append(("p1", lambda v: -1j * hbar * apply_derivative(ops1.d1, v, grid, 0)))
    if grid.n2 > 1:
        xi.append(("p2", lambda v: -1j * hbar * apply_derivative(ops2.d1, v, grid, 1)))
    return xi


def _phase_space_vectors(state: np.ndarray, grid: Grid2D, k: float, hbar: float,
                         stencil: str, xi_scaling: str) -> tuple[np.ndarray, tuple]:
    angle = 1.0 / k if xi_scaling == "balanced" else 1.0
    columns, labels = [], []
    for label, act in _xi_operators(grid, hbar, stencil):
        if label.startswith("p"):
            columns.append(k * act(state))
            labels.append(f"k·{label}")
        else:
            columns.append(angle * act(state))
            labels.append(label)
    return np.column_stack(columns), tuple(labels)


def covariance(state: np.ndarray, grid: Grid2D, k: float, hbar: float = 1.0,
               stencil: str = "fourier", centered: bool = False,
               xi_scaling: str = "angles") -> CovarianceMatrix:
    """
    G_ij = Re⟨ψ|½{ξᵢ,ξⱼ}|ψ⟩ = Re⟨ξᵢψ|ξⱼψ⟩ (ξ hermitianos), uma matriz de Gram:
    simétrica e PSD por construção. `centered` subtrai ⟨ξ⟩⟨ξ⟩ᵀ.
    """
    state = np.asarray(state, dtype=complex)
    columns, labels = _phase_space_vectors(state, grid, k, hbar, stencil, xi_scaling)
    w = grid.weight
    gram = w * (columns.conj().T @ columns)
    matrix = gram.real.copy()
    means = w * (state.conj() @ columns).real
    if centered:
        matrix -= np.outer(means, means)
    matrix = 0.5 * (matrix + matrix.T)
    return CovarianceMatrix(matrix=matrix, means=means, labels=labels)


def _as_array(g) -> np.ndarray:
    return g.matrix if isinstance(g, CovarianceMatrix) else np.asarray(g, dtype=float)


def delta_spectrum(G_R, G_T) -> np.ndarray:
    """Autovalores de G_R^{−1/2}·G_T·G_R^{−1/2} (= espectro de Δ = G_T·G_R⁻¹)."""
    ref, tgt = _as_array(G_R), _as_array(G_T)
    evals, evecs = np.linalg.eigh(ref)
    if evals[0] <= 0 or evals[-1] / evals[0] > MAX_COND:
        cond = math.inf if evals[0] <= 0 else evals[-1] / evals[0]
        raise SingularReference(f"G_R mal condicionada (cond={cond:.3e})")
    root = evecs @ np.diag(evals ** -0.5) @ evecs.T
    sym = root @ tgt @ root
    return np.linalg.eigvalsh(0.5 * (sym + sym.T))


def complexity_value(G_R, G_T) -> float:
    delta = delta_spectrum(G_R, G_T)
    if np.any(delta <= 0):
        raise NonPositiveDelta(f"autovalor de Δ ≤ 0: {delta.min():.3e}")
    return float(math.sqrt(np.sum(np.log(delta) ** 2)) / (2 * math.sqrt(2)))


def gaussianity_deficit(state: np.ndarray, grid: Grid2D, hbar: float = 1.0,
                        stencil: str = "fourier") -> float:
    """max |⟨(ξ−μ)⁴⟩/(3⟨(ξ−μ)²⟩²) − 1| sobre θᵢ e pᵢ; zero para uma gaussiana."""
    state = np.asarray(state, dtype=complex)
    w = grid.weight
    worst = 0.0
    for _, act in _xi_operators(grid, hbar, stencil):
        first = act(state)
        mean = w * np.vdot(state, first).real
        shifted = first - mean * state
        second = w * np.vdot(shifted, shifted).real
        if second <= 0:
            continue
        twice = act(shifted) - mean * shifted
        fourth = w * np.vdot(twice, twice).real
        worst = max(worst, abs(fourth / (3 * second ** 2) - 1))
    return float(worst)


# ──────────────────────────────────────────
# Série temporal
# ──────────────────────────────────────────

def _last_half_fit(times: np.ndarray, values: np.ndarray) -> LinearFit | None:
    start = times.size // 2
    t, y = times[start:], values[start:]
    if t.size < 3 or np.ptp(t) == 0:
        return None
    res = stats.linregress(t, y)
    return LinearFit(slope=float(res.slope), intercept=float(res.intercept),
                     r2=float(res.rvalue ** 2), window=(float(t[0]), float(t[-1])))


def complexity_series(eigH, eigHprime, config: ComplexityConfig, times,
                      workers: int = 1) -> ComplexitySeries:
    """𝒞(t) ponto a ponto e reta de mínimos quadrados na última metade da janela."""
    _check_same_grid(eigH, eigHprime)
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise InsufficientData("série de tempos vazia")
    if times[0] != 0:
        raise ValueError("a série de tempos deve começar em t = 0")

    params = eigH.params
    k = config.balancing(params)
    ell = params.l1 + params.l2 if config.ell_eff is None else config.ell_eff
    opts = {"k": k, "hbar": params.hbar, "stencil": eigH.stencil,
            "centered": config.centered, "xi_scaling": config.xi_scaling}

    psi0 = eigH.eigenvectors[:, 0]
    reference = covariance(psi0, eigH.grid, **opts)

    def point(t: float) -> tuple[float, float, float]:
        state = target_state(eigH, eigHprime, t, M=config.M)
        loss = abs(1.0 - state_norm(state, eigH.grid))
        target = covariance(state, eigH.grid, **opts)
        delta = delta_spectrum(reference, target)
        if np.any(delta <= 0):
            raise NonPositiveDelta(f"t={t}: autovalor de Δ ≤ 0 ({delta.min():.3e})")
        return complexity_value(reference, target), float(delta.min()), loss

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, times))
    else:
        results = [point(t) for t in times]
    values = np.array([r[0] for r in results])

    series = ComplexitySeries(
        times=times, C=values, linear_fit=_last_half_fit(times, values),
        k=k, epsilon=config.epsilon, ell_eff=ell,
        reference_condition=reference.condition,
        min_delta=min(r[1] for r in results),
        max_norm_loss=max(r[2] for r in results),
        gaussianity_deficit=gaussianity_deficit(psi0, eigH.grid, params.hbar, eigH.stencil),
    )
    if series.max_norm_loss > NORM_TOL:
        series.flags.append(f"perda de norma na base de H′: {series.max_norm_loss:.2e}")
    if series.linear_fit is not None and not series.linear_growth:
        fit = series.linear_fit
        series.flags.append(f"critério de crescimento linear não atendido "
                            f"(R²={fit.r2:.3g}, λ={fit.slope:.3e})")
    for flag in series.flags:
        warnings.warn(flag, ChaologyWarning, stacklevel=2)
    return series


# ──────────────────────────────────────────
# Markdown
# ──────────────────────────────────────────

def to_markdown(runs: dict[float, ComplexitySeries]) -> str:
    lines = ["## Complexidade de Circuito", ""]
    lines += ["| g | k | inclinação λ | R² | crescimento linear | cond(G_R) | déficit gaussiano |",
              "|---|---|---|---|---|---|---|"]
    for g, s in sorted(runs.items()):
        fit = s.linear_fit
        slope = f"{fit.slope:.4g}" if fit else "—"
        r2 = f"{fit.r2:.3f}" if fit else "—"
        growth = "—" if fit is None else ("✅" if s.linear_growth else "❌ não atendido")
        lines.append(f"| {g:g} | {s.k:.4f} | {slope} | {r2} | {growth} | {s.reference_condition:.2e} "
                     f"| {s.gaussianity_deficit:.3f} |")
    slopes = [s.linear_fit.slope for _, s in sorted(runs.items()) if s.linear_fit is not None]
    if len(slopes) >= 2:
        decreasing = all(a > b for a, b in zip(slopes, slopes[1:]))
        met = sum(s.linear_growth for s in runs.values())
        lines.append("")
        lines.append(f"**Crescimento linear:** {met}/{len(runs)} séries · "
                     f"λ decrescente em g: {'✅' if decreasing else '❌'}")
    flagged = [(g, s) for g, s in sorted(runs.items()) if s.flags]
    if flagged:
        lines.append("")
        for g, s in flagged:
            lines += [f"> ⚠️ g={g:g}: {flag}" for flag in s.flags]
    lines.append("")
    return "\n".join(lines)
