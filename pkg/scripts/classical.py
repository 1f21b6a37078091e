#!/usr/bin/env python3
"""
classical.py
Dinâmica clássica do pêndulo duplo: equações de Hamilton, integração
adaptativa com monitor de energia, divergência δΩ(t) entre trajetórias
vizinhas, ajuste do expoente de Lyapunov, tempo de scrambling e varredura em g.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from scripts.errors import ChaologyError, ChaologyWarning, InsufficientData, StepFailure
from scripts.model import (
    PendulumParams, PhaseState, characteristic_time, hamiltonian_gradient,
    kinetic_energy, potential_energy, wrap_angle,
)

DEFAULT_TOL   = 1e-8
MIN_RTOL      = 1e-13
MAX_REFINES   = 2
ORDER_ONE     = 1.0
MIN_FIT_SAMPLES = 10


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray      # (n,)
    states: np.ndarray     # (n, 4) θ₁, θ₂ em [−π, π), p₁, p₂
    lifted: np.ndarray     # (n, 2) ângulos contínuos (sem wrap)
    energy: np.ndarray     # (n,)

    @property
    def energy_drift(self) -> float:
        return _relative_drift(self.energy)

    def state_at(self, index: int) -> PhaseState:
        return PhaseState.from_array(self.states[index])


@dataclass(frozen=True)
class DivergenceSeries:
    times: np.ndarray
    delta_omega: np.ndarray         # forma padrão √(|Δq|² + k⁴|Δp|²)
    delta_omega_paper: np.ndarray   # diferença de normas, com sinal preservado
    k: float
    energy_drift: float = 0.0


@dataclass(frozen=True)
class LyapunovFit:
    a1: float
    a2: float
    lambda_L: float
    t_star: float | None
    fit_window: tuple
    rms: float
    mode: str

    def to_dict(self) -> dict:
        return {
            "a1": self.a1, "a2": self.a2, "lambda_L": self.lambda_L,
            "t_star": self.t_star, "fit_window": list(self.fit_window),
            "rms": self.rms, "mode": self.mode,
        }


# ──────────────────────────────────────────
# Condições iniciais de referência
# ──────────────────────────────────────────

def lyapunov_initial_conditions(epsilon: float = 1e-6 * math.pi) -> tuple[PhaseState, PhaseState]:
    """Par q₁(0)=0.99π/2, q₂(0)=0.99π, p=0 e o mesmo com q₂ + ε."""
    base = PhaseState(0.99 * math.pi / 2, 0.99 * math.pi, 0.0, 0.0)
    return base, PhaseState(base.theta1, base.theta2 + epsilon, 0.0, 0.0)


def trajectory_initial_conditions(epsilon: float = 1e-6) -> tuple[PhaseState, PhaseState]:
    """Par θ₁(0)=π/2 (e π/2+ε), θ₂(0)=π/2, repouso."""
    base = PhaseState(math.pi / 2, math.pi / 2, 0.0, 0.0)
    return base, PhaseState(base.theta1 + epsilon, base.theta2, 0.0, 0.0)


# Os três pêndulos de referência (m₁ = m₂ = 1)
PRESETS = {
    "equal-g1":    PendulumParams(l1=1.0, l2=1.0, g=1.0),
    "long-upper":  PendulumParams(l1=4.0 / 3.0, l2=2.0 / 3.0, g=1.0),
    "equal-g10":   PendulumParams(l1=1.0, l2=1.0, g=10.0),
}


# ──────────────────────────────────────────
# Equações de movimento
# ──────────────────────────────────────────

def _hamilton_rhs(params: PendulumParams, y: np.ndarray) -> np.ndarray:
    grad = hamiltonian_gradient(params, y)
    return np.array([grad[2], grad[3], -grad[0], -grad[1]])


def equations_of_motion(params: PendulumParams, state: PhaseState) -> PhaseState:
    """(θ̇₁, θ̇₂, ṗ₁, ṗ₂) = (∂H/∂p₁, ∂H/∂p₂, −∂H/∂θ₁, −∂H/∂θ₂)."""
    return PhaseState.from_array(_hamilton_rhs(params, state.as_array()))


def _energy(params: PendulumParams, y: np.ndarray) -> np.ndarray:
    theta1, theta2, p1, p2 = y
    return kinetic_energy(params, theta1, theta2, p1, p2) + potential_energy(params, theta1, theta2)


def _relative_drift(energy: np.ndarray) -> float:
    e0 = energy[0]
    return float(np.max(np.abs(energy - e0)) / max(1.0, abs(e0)))


def _sample_times(t_max: float, dt: float) -> np.ndarray:
    if t_max <= 0 or dt <= 0:
        raise ValueError("t_max e dt devem ser > 0")
    count = int(math.floor(t_max / dt + 1e-9))
    return dt * np.arange(count + 1)


def _solve(rhs, y0: np.ndarray, times: np.ndarray, rtol: float, method: str) -> np.ndarray:
    sol = solve_ivp(
        rhs, (times[0], times[-1]), y0,
        method=method, t_eval=times, dense_output=True,
        rtol=rtol, atol=rtol * 1e-1,
    )
    if sol.status < 0 or sol.y.shape[1] != times.size:
        raise StepFailure(f"integrador falhou: {sol.message}")
    return sol.y


def _integrate_checked(params: PendulumParams, rhs, y0: np.ndarray, times: np.ndarray,
                       tol: float, method: str, blocks: int) -> tuple[np.ndarray, float]:
    """Integra e refina a tolerância até o drift de energia ficar abaixo de `tol`."""
    rtol = max(tol * 1e-3, MIN_RTOL)
    drift = math.inf
    for _ in range(MAX_REFINES + 1):
        y = _solve(rhs, y0, times, rtol, method)
        drift = max(_relative_drift(_energy(params, y[4 * b:4 * b + 4])) for b in range(blocks))
        if drift <= tol:
            return y, drift
        if rtol <= MIN_RTOL:
            break
        rtol = max(rtol * 1e-2, MIN_RTOL)
    raise StepFailure(f"drift de energia {drift:.3e} acima da tolerância {tol:.1e}")


# ──────────────────────────────────────────
# Integração
# ──────────────────────────────────────────

def integrate(params: PendulumParams, initial: PhaseState, t_max: float, dt: float,
              tol: float = DEFAULT_TOL, method: str = "RK45") -> Trajectory:
    times = _sample_times(t_max, dt)
    y0 = initial.as_array()

    def rhs(_t, y):
        return _hamilton_rhs(params, y)

    y, _ = _integrate_checked(params, rhs, y0, times, tol, method, blocks=1)
    lifted = y[:2].T.copy()
    states = y.T.copy()
    states[:, :2] = wrap_angle(lifted)
    return Trajectory(times=times, states=states, lifted=lifted, energy=_energy(params, y))


def divergence(params: PendulumParams, ic_a: PhaseState, ic_b: PhaseState,
               k: float | None = None, t_max: float = 40.0, dt: float = 0.01,
               tol: float = DEFAULT_TOL, method: str = "RK45") -> DivergenceSeries:
    """
    Integra as duas trajetórias como um único sistema de 8 componentes,
    de modo que compartilham exatamente a mesma sequência de passos.
    """
    k = characteristic_time(params) if k is None else float(k)
    times = _sample_times(t_max, dt)
    y0 = np.concatenate([ic_a.as_array(), ic_b.as_array()])

    def rhs(_t, y):
        return np.concatenate([_hamilton_rhs(params, y[:4]), _hamilton_rhs(params, y[4:])])

    y, drift = _integrate_checked(params, rhs, y0, times, tol, method, blocks=2)
    q_a, p_a = y[0:2], y[2:4]
    q_b, p_b = y[4:6], y[6:8]
    k4 = k ** 4

    standard = np.sum((q_b - q_a) ** 2, axis=0) + k4 * np.sum((p_b - p_a) ** 2, axis=0)
    literal = (np.sum(q_b ** 2, axis=0) + k4 * np.sum(p_b ** 2, axis=0)
               - np.sum(q_a ** 2, axis=0) - k4 * np.sum(p_a ** 2, axis=0))

    return DivergenceSeries(
        times=times,
        delta_omega=np.sqrt(standard),
        delta_omega_paper=np.sign(literal) * np.sqrt(np.abs(literal)),
        k=k,
        energy_drift=drift,
    )


# ──────────────────────────────────────────
# Lyapunov e scrambling
# ──────────────────────────────────────────

def scrambling_time(times: np.ndarray, values: np.ndarray, threshold: float = ORDER_ONE) -> float | None:
    """Primeiro t com δΩ ≥ threshold, interpolado linearmente entre amostras."""
    above = np.nonzero(values >= threshold)[0]
    if above.size == 0:
        return None
    i = int(above[0])
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    v0, v1 = values[i - 1], values[i]
    return float(t0 + (threshold - v0) * (t1 - t0) / (v1 - v0))


def fit_lyapunov(series: DivergenceSeries, mode: str = "until-order-one",
                 literal: bool = False) -> LyapunovFit:
    """
    Ajuste linear de lg δΩ(t) = a₁ + a₂ t; λ_L = a₂·ln10.
    `mode`: "full-window" (janela inteira) ou "until-order-one" (até δΩ = 1).
    Em "until-order-one", se δΩ chega a 1 antes de MIN_FIT_SAMPLES amostras
    (inclusive já na primeira), o ajuste usa a janela inteira e emite aviso.
    """
    if mode not in ("full-window", "until-order-one"):
        raise ValueError(f"modo de ajuste desconhecido: {mode}")
    values = series.delta_omega_paper if literal else series.delta_omega
    times = series.times
    t_star = scrambling_time(times, values)

    mask = values > 0
    if mode == "until-order-one" and t_star is not None:
        early = mask & (times <= t_star)
        if int(early.sum()) >= MIN_FIT_SAMPLES:
            mask = early
        else:
            warnings.warn(
                f"δΩ atinge 1 em t*={t_star:.4g} com {int(early.sum())} amostras; "
                "ajuste sobre a janela inteira",
                ChaologyWarning, stacklevel=2,
            )
    if int(mask.sum()) < MIN_FIT_SAMPLES:
        raise InsufficientData(
            f"apenas {int(mask.sum())} amostras positivas na janela (mínimo {MIN_FIT_SAMPLES})"
        )

    t = times[mask]
    lg = np.log10(values[mask])
    a2, a1 = np.polyfit(t, lg, 1)
    residual = lg - (a1 + a2 * t)

    return LyapunovFit(
        a1=float(a1),
        a2=float(a2),
        lambda_L=float(a2 * math.log(10)),
        t_star=t_star,
        fit_window=(float(t[0]), float(t[-1])),
        rms=float(np.sqrt(np.mean(residual ** 2))),
        mode=mode,
    )


# ──────────────────────────────────────────
# Varredura em g
# ──────────────────────────────────────────

def _sweep_row(job: tuple) -> dict:
    params, ic_a, ic_b, k, t_max, dt, tol, method, mode = job
    try:
        series = divergence(params, ic_a, ic_b, k, t_max, dt, tol, method)
        fit = fit_lyapunov(series, mode)
        return {
            "g": params.g, "lambda": fit.lambda_L, "t_star": fit.t_star,
            "rms": fit.rms, "status": "ok",
        }
    except ChaologyError as e:
        return {"g": params.g, "lambda": None, "t_star": None, "rms": None,
                "status": "error", "message": str(e)}


def sweep_g(template: PendulumParams, g_list: list[float],
            ic_pair: tuple[PhaseState, PhaseState] | None = None,
            k: float | None = None, t_max: float = 40.0, dt: float = 0.01,
            tol: float = DEFAULT_TOL, method: str = "RK45",
            mode: str = "until-order-one", workers: int = 1) -> list[dict]:
    """
    Uma linha (g, λ_L, t*, rms) por valor de g, na ordem de g.
    Com k=None cada linha usa o k próprio do seu g.
    Erros por linha ficam registrados e a varredura continua.
    """
    if not g_list:
        raise ValueError("g_list vazio")
    ic_a, ic_b = ic_pair or lyapunov_initial_conditions()
    jobs = [
        (template.with_changes(g=float(g)), ic_a, ic_b, k, t_max, dt, tol, method, mode)
        for g in sorted(g_list)
    ]
    if workers <= 1 or len(jobs) == 1:
        return [_sweep_row(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_row, jobs))


# ──────────────────────────────────────────
# Markdown
# ──────────────────────────────────────────

def to_markdown(fits: dict[str, LyapunovFit] | None = None, sweep: list[dict] | None = None,
                drift: float | None = None) -> str:
    lines = ["## Dinâmica Clássica", ""]
    if drift is not None:
        lines.append(f"**Drift máximo de energia:** {drift:.2e}")
        lines.append("")
    if fits:
        lines += ["| Ajuste | a₁ | a₂ | λ_L | t* | janela | rms |", "|---|---|---|---|---|---|---|"]
        for name, fit in fits.items():
            t_star = f"{fit.t_star:.3f}" if fit.t_star is not None else "—"
            lines.append(
                f"| {name} | {fit.a1:.4f} | {fit.a2:.4f} | {fit.lambda_L:.4f} | {t_star} "
                f"| [{fit.fit_window[0]:.2f}, {fit.fit_window[1]:.2f}] | {fit.rms:.3e} |"
            )
        lines.append("")
    if sweep:
        lines += ["| g | λ_L | t* | status |", "|---|---|---|---|"]
        for row in sweep:
            lam = f"{row['lambda']:.4f}" if row["lambda"] is not None else "—"
            t_star = f"{row['t_star']:.3f}" if row["t_star"] is not None else "—"
            lines.append(f"| {row['g']:g} | {lam} | {t_star} | {row['status']} |")
        lines.append("")
    return "\n".join(lines)
