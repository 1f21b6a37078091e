#!/usr/bin/env python3
"""
otoc.py
OTOC térmico F(t) = ⟨W(t)V W(t)V⟩_β e comutador quadrado C(t) na base
truncada de autoestados, com V = p₁ (ou p₂) e W = sin θ₁ (padrão) ou o
ângulo θ₁ (ou os equivalentes do canal 2).
Ajuste de curto prazo a + b·e^{λt}, relatório da cota MSS e diagnóstico
da estrutura C(0), decaimento de F e platô tardio de C.

Convenção de momento: p = −iħ∂ (F e C não dependem do sinal).
O ângulo tem um salto de 2π em ±π; sin θ é periódico e limitado, e
[sin θ, p] = iħ·cos θ dá C(0) = ħ²⟨cos²θ⟩_β.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import curve_fit

from scripts.errors import ChaologyWarning, NoConvergence, OverflowGuard, TruncationError
from scripts.spectral import apply_derivative, axis_ops

KINDS = ("theta1", "theta2", "sin1", "sin2", "p1", "p2", "p1sq", "p2sq",
         "theta1sq", "theta2sq", "sin1sq", "sin2sq")
POSITIONS = ("sin", "theta")
C_FORMS = ("hermitian", "paper")

DEFAULT_M          = 2000
DEFAULT_FIT_WINDOW = 10
HERMITICITY_TOL    = 1e-8
STABILITY_TOL      = 0.05
STABILITY_HORIZON  = 5.0
C0_TOL             = 0.10
DECAY_RATIO        = 0.10
EDGE_FRACTION      = 0.25    # janelas inicial e final do diagnóstico de estrutura


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class OperatorMatrix:
    kind: str
    entries: np.ndarray     # (M, M); complexo para momentos
    M: int


@dataclass
class OtocSeries:
    times: np.ndarray
    F: np.ndarray           # complexo
    C: np.ndarray           # real (resíduo imaginário descartado após checagem)
    beta: float
    M: int
    Z: float                # soma de partição com pesos deslocados por E₀
    log_Z: float            # log da soma de partição sem deslocamento
    channel: int = 1
    c_form: str = "hermitian"
    max_imag_C: float = 0.0
    imag_F0: float = 0.0
    renormalized: bool = False
    converged: bool | None = None
    flags: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class OtocFit:
    a: float
    b: float
    lambda_q: float
    window: tuple
    beta: float
    mss_bound: float
    saturation_ratio: float
    target: str = "F"
    M: int = 0

    def to_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b, "lambda_q": self.lambda_q,
            "window": list(self.window), "beta": self.beta, "M": self.M,
            "saturation_ratio": self.saturation_ratio, "target": self.target,
        }


# ──────────────────────────────────────────
# Elementos de matriz
# ──────────────────────────────────────────

def operator_matrix(eig, kind: str, M: int, reliable_count: int | None = None) -> OperatorMatrix:
    """
    ⟨Ψₙ|O|Ψₖ⟩ sobre os M estados mais baixos, com peso de quadratura.
    θ, sin θ: multiplicação diagonal (θ vale 0 no nó −π, θ² vale π²);
    p: −iħ·D; p²: −ħ²·𝔻 (segunda derivada direta).
    """
    if kind not in KINDS:
        raise ValueError(f"operador desconhecido: {kind} (use {KINDS})")
    limit = eig.count if reliable_count is None else min(reliable_count, eig.count)
    if M > limit:
        raise TruncationError(f"M={M} excede os {limit} estados confiáveis")

    psi = eig.eigenvectors[:, :M]
    grid = eig.grid
    hbar = eig.params.hbar
    axis = 0 if "1" in kind else 1

    if kind.startswith(("theta", "sin")):
        if kind.endswith("sq"):
            angle = grid.mesh()[axis]
            values = np.sin(angle) ** 2 if kind.startswith("sin") else angle ** 2
        else:
            angle = grid.branch_angles()[axis]
            values = np.sin(angle) if kind.startswith("sin") else angle
        entries = eig.weight * (psi.T @ (values[:, None] * psi))
    else:
        ops = axis_ops(grid, eig.stencil)[axis]
        if kind.endswith("sq"):
            applied = apply_derivative(ops.dd1, psi, grid, axis)
            entries = -hbar ** 2 * eig.weight * (psi.T @ applied)
        else:
            applied = apply_derivative(ops.d1, psi, grid, axis)
            entries = -1j * hbar * eig.weight * (psi.T @ applied)
    return OperatorMatrix(kind=kind, entries=entries, M=M)


def hermiticity_error(op: OperatorMatrix) -> float:
    return float(np.max(np.abs(op.entries - op.entries.conj().T)))


def momentum_square_defect(p: OperatorMatrix, p_sq: OperatorMatrix, block: int | None = None) -> float:
    """‖p² − p·p‖ no bloco inferior; encolhe quando M cresce (resolução da identidade)."""
    block = min(p.M, p_sq.M) // 2 if block is None else block
    product = (p.entries @ p.entries)[:block, :block]
    return float(np.linalg.norm(p_sq.entries[:block, :block] - product))


# ──────────────────────────────────────────
# Séries temporais
# ──────────────────────────────────────────

def thermal_weights(eigenvalues: np.ndarray, beta: float) -> tuple[np.ndarray, float, bool]:
    """Pesos e^{−β(Eₙ−E₀)}/Z e log Z; sinaliza se os pesos crus subfluíam."""
    if not (beta > 0 and math.isfinite(beta)):
        raise ValueError("beta deve ser finito e > 0")
    if not np.all(np.isfinite(eigenvalues)):
        raise OverflowGuard("autovalores não finitos")
    e0 = float(eigenvalues[0])
    shifted = np.exp(-beta * (eigenvalues - e0))
    total = float(shifted.sum())
    if not (math.isfinite(total) and total > 0):
        raise OverflowGuard(f"soma de partição degenerada para beta={beta}")
    with np.errstate(under="ignore", over="ignore"):
        raw = np.exp(-beta * eigenvalues)
    renormalized = not np.any(raw > 0) or not np.all(np.isfinite(raw))
    return shifted / total, math.log(total) - beta * e0, renormalized


def otoc_series(ops: dict[str, OperatorMatrix], eigenvalues: np.ndarray, beta: float,
                times: np.ndarray, M: int | None = None, channel: int = 1,
                c_form: str = "hermitian", position: str = "sin") -> OtocSeries:
    """
    F(t) = Σₙ ρₙ [W(t) V W(t) V]ₙₙ com W(t) = e^{iEt} W e^{−iEt} aplicado como
    escala diagonal. `ops` precisa de {position}{c}, p{c}, p{c}sq e (forma
    hermitiana) {position}{c}sq, com position ∈ {sin, theta}.

    `hermitian`: C = ⟨W V² W⟩ + ⟨V W² V⟩ − F − F̃, real e ≥ 0 até truncamento.
    `paper`:     C = 2⟨W V² W⟩ − 2F.
    """
    if c_form not in C_FORMS:
        raise ValueError(f"c_form desconhecido: {c_form}")
    if position not in POSITIONS:
        raise ValueError(f"posição desconhecida: {position} (use {POSITIONS})")
    W = ops[f"{position}{channel}"].entries
    V = ops[f"p{channel}"].entries
    V2 = ops[f"p{channel}sq"].entries
    W2 = ops[f"{position}{channel}sq"].entries if c_form == "hermitian" else None
    M = W.shape[0] if M is None else M
    W, V, V2 = W[:M, :M], V[:M, :M], V2[:M, :M]
    if W2 is not None:
        W2 = W2[:M, :M]

    energies = np.asarray(eigenvalues[:M], dtype=float)
    rho, log_z, renormalized = thermal_weights(energies, beta)
    times = np.asarray(times, dtype=float)
    F = np.empty(times.size, dtype=complex)
    C = np.empty(times.size, dtype=complex)

    for idx, t in enumerate(times):
        phase = np.exp(1j * energies * t)
        Wt = phase[:, None] * W * phase.conj()[None, :]
        WV = Wt @ V
        F[idx] = np.einsum("n,nk,kn->", rho, WV, WV)
        wv2w = np.einsum("n,nk,kn->", rho, Wt @ V2, Wt)
        if c_form == "paper":
            C[idx] = 2 * wv2w - 2 * F[idx]
        else:
            W2t = phase[:, None] * W2 * phase.conj()[None, :]
            VW = V @ Wt
            F_rev = np.einsum("n,nk,kn->", rho, VW, VW)
            vw2v = np.einsum("n,nk,kn->", rho, V @ W2t, V)
            C[idx] = wv2w + vw2v - F[idx] - F_rev

    scale = float(np.max(np.abs(C))) or 1.0
    series = OtocSeries(
        times=times, F=F, C=C.real.copy(), beta=beta, M=M,
        Z=float(np.exp(log_z + beta * energies[0])), log_Z=log_z,
        channel=channel, c_form=c_form,
        max_imag_C=float(np.max(np.abs(C.imag))) / scale,
        imag_F0=float(abs(F[0].imag) / max(abs(F[0]), 1e-300)) if times.size and times[0] == 0 else 0.0,
        renormalized=renormalized,
    )
    if c_form == "hermitian" and series.max_imag_C > HERMITICITY_TOL:
        series.flags.append(f"resíduo imaginário de C {series.max_imag_C:.2e}")
    if renormalized:
        series.flags.append("pesos renormalizados por e^{+βE₀}")
    for flag in series.flags:
        warnings.warn(flag, ChaologyWarning, stacklevel=2)
    return series


def truncation_stability(ops: dict[str, OperatorMatrix], eigenvalues: np.ndarray, beta: float,
                         times: np.ndarray, M: int, channel: int = 1,
                         c_form: str = "hermitian", position: str = "sin") -> float:
    """Variação relativa máxima de F(t) em t ∈ [0, 5] entre truncamentos M/2 e M."""
    early = np.asarray(times)[np.asarray(times) <= STABILITY_HORIZON]
    full = otoc_series(ops, eigenvalues, beta, early, M, channel, c_form, position).F
    half = otoc_series(ops, eigenvalues, beta, early, M // 2, channel, c_form, position).F
    return float(np.max(np.abs(full - half)) / max(float(np.max(np.abs(full))), 1e-300))


def mark_convergence(series: OtocSeries, change: float) -> OtocSeries:
    series.converged = change < STABILITY_TOL
    if not series.converged:
        series.flags.append(f"truncamento instável: ΔF relativo {change:.1%}")
        warnings.warn(series.flags[-1], ChaologyWarning, stacklevel=2)
    return series


# ──────────────────────────────────────────
# Estrutura: C(0), decaimento de F, platô de C
# ──────────────────────────────────────────

def commutator_origin(eig, beta: float, M: int, channel: int = 1, position: str = "sin") -> float:
    """
    Valor canônico de C(0) = ħ²⟨(dW/dθ)²⟩_β sobre os M estados mais baixos:
    ħ² para W = θ e ħ²⟨cos²θ⟩_β para W = sin θ.
    """
    if position not in POSITIONS:
        raise ValueError(f"posição desconhecida: {position} (use {POSITIONS})")
    hbar = eig.params.hbar
    if position == "theta":
        return hbar ** 2
    cos_sq = np.cos(eig.grid.mesh()[channel - 1]) ** 2
    psi = eig.eigenvectors[:, :M]
    diagonal = eig.weight * np.einsum("kn,k,kn->n", psi, cos_sq, psi)
    rho, _, _ = thermal_weights(np.asarray(eig.eigenvalues[:M], dtype=float), beta)
    return float(hbar ** 2 * (rho @ diagonal))


def structure_report(series: OtocSeries, reference: float,
                     edge_fraction: float = EDGE_FRACTION) -> dict:
    """
    C(0) contra o valor canônico (±10%), razão entre a média tardia de |F| e
    o máximo inicial de |F| (< 0.1) e inclinação tardia de C compatível com
    zero a 2σ. Critérios não atendidos viram flags e avisos, nunca exceções.
    """
    times, F, C = series.times, np.abs(series.F), series.C
    report = {"beta": series.beta, "M": series.M, "c0": None, "c0_reference": reference,
              "c0_ratio": None, "c0_ok": None, "f_decay_ratio": None, "f_decays": None,
              "late_c_slope": None, "late_c_slope_stderr": None, "c_saturates": None}
    flags = []

    if times.size and times[0] == 0:
        report["c0"] = float(C[0])
        if reference > 0:
            report["c0_ratio"] = float(C[0] / reference)
            report["c0_ok"] = abs(report["c0_ratio"] - 1) <= C0_TOL
            if not report["c0_ok"]:
                flags.append(f"C(0)={C[0]:.4g} fora de 10% do valor canônico {reference:.4g}")

    edge = max(int(times.size * edge_fraction), 1)
    if times.size >= 2 * edge:
        early_max = float(np.max(F[:edge]))
        if early_max > 0:
            report["f_decay_ratio"] = float(np.mean(F[-edge:]) / early_max)
            report["f_decays"] = report["f_decay_ratio"] < DECAY_RATIO
            if not report["f_decays"]:
                flags.append(f"|F| tardio não decai: razão {report['f_decay_ratio']:.3f}")
    if edge >= 3 and np.ptp(times[-edge:]) > 0:
        res = stats.linregress(times[-edge:], C[-edge:])
        report["late_c_slope"] = float(res.slope)
        report["late_c_slope_stderr"] = float(res.stderr)
        report["c_saturates"] = bool(abs(res.slope) <= 2 * res.stderr)
        if not report["c_saturates"]:
            flags.append(f"C tardio ainda varia: inclinação {res.slope:.3e} ± {res.stderr:.1e}")

    report["flags"] = flags
    for flag in flags:
        warnings.warn(f"β={series.beta:.4g}: {flag}", ChaologyWarning, stacklevel=2)
    return report


# ──────────────────────────────────────────
# Ajuste de curto prazo e cota MSS
# ──────────────────────────────────────────

def _template(t, a, b, lam):
    return a + b * np.exp(lam * t)


def _initial_guess(t: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    diffs = np.diff(y)
    steps = np.diff(t)
    ratios = diffs[1:] / diffs[:-1]
    good = ratios > 0
    if np.any(good):
        lam = float(np.mean(np.log(ratios[good]) / steps[1:][good]))
    else:
        lam = 1.0 / max(t[-1] - t[0], 1e-12)
    if abs(lam) < 1e-12:
        lam = 1e-3
    growth = np.exp(lam * t)
    design = np.column_stack([np.ones_like(t), growth])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(a), float(b), lam


def fit_otoc_short_time(series: OtocSeries, window: int = DEFAULT_FIT_WINDOW,
                        target: str = "F", hbar: float = 1.0) -> OtocFit:
    """a + b·e^{λt} sobre as primeiras `window` amostras de Re F (ou de C)."""
    if window < 4:
        raise ValueError("janela de ajuste precisa de ao menos 4 amostras")
    if series.times.size < window:
        raise NoConvergence("série menor que a janela", {"samples": int(series.times.size)})
    t = series.times[:window]
    y = (series.F.real if target == "F" else series.C)[:window]
    if np.ptp(y) == 0:
        raise NoConvergence("janela plana: ajuste mal posto", {"value": float(y[0])})

    p0 = _initial_guess(t, y)
    try:
        popt, pcov = curve_fit(_template, t, y, p0=p0, maxfev=20000,
                               ftol=1e-15, xtol=1e-15, gtol=1e-15)
    except (RuntimeError, ValueError) as e:
        raise NoConvergence(f"curve_fit falhou: {e}", {"p0": p0, "window": window}) from e
    if not np.all(np.isfinite(popt)):
        raise NoConvergence("parâmetros não finitos", {"p0": p0, "popt": popt.tolist()})

    a, b, lam = (float(v) for v in popt)
    bound = mss_bound(series.beta, hbar)
    return OtocFit(
        a=a, b=b, lambda_q=lam, window=(float(t[0]), float(t[-1])),
        beta=series.beta, mss_bound=bound, saturation_ratio=lam / bound,
        target=target, M=series.M,
    )


def mss_bound(beta: float, hbar: float = 1.0) -> float:
    return 2 * math.pi / (beta * hbar)


def mss_report(fit: OtocFit) -> dict:
    """λ^q, cota 2π/(βħ) e razão de saturação; violações são sinalizadas, nunca cortadas."""
    ratio = fit.saturation_ratio
    if fit.lambda_q < 0:
        status = "no growth"
        warnings.warn(f"λ^q={fit.lambda_q:.4g} < 0: sem crescimento exponencial na janela",
                      ChaologyWarning, stacklevel=2)
    elif ratio > 1 + 1e-9:
        status = "violation"
    elif ratio >= 1 - 1e-9:
        status = "saturated"
    elif ratio < 0.1:
        status = "far below saturation"
    else:
        status = "below saturation"
    if status == "violation":
        warnings.warn(f"λ^q={fit.lambda_q:.4g} viola a cota MSS (razão {ratio:.3f})",
                      ChaologyWarning, stacklevel=2)
    return {
        "lambda_q": fit.lambda_q,
        "bound": fit.mss_bound,
        "saturation_ratio": ratio,
        "status": status,
        "violation": status == "violation",
    }


def beta_grid(exponents=range(4, 9)) -> list[float]:
    """β com 2π/β = 2ᵉπ."""
    return [2 * math.pi / (2 ** e * math.pi) for e in exponents]


# ──────────────────────────────────────────
# Markdown
# ──────────────────────────────────────────

def _mark(value) -> str:
    return "—" if value is None else ("✅" if value else "❌")


def to_markdown(fits: list[OtocFit], series: list[OtocSeries] | None = None,
                structures: list[dict] | None = None) -> str:
    lines = ["## OTOC", ""]
    lines += ["| 2π/β | a | b | λ^q | razão MSS |", "|---|---|---|---|---|"]
    for fit in fits:
        lines.append(f"| {2 * math.pi / fit.beta:.4g} | {fit.a:.4f} | {fit.b:.4f} "
                     f"| {fit.lambda_q:.4f} | {fit.saturation_ratio:.2e} |")
    if structures:
        lines += ["", "### Estrutura", "",
                  "| 2π/β | C(0) / canônico | C(0) ±10% | \\|F\\| tardio / inicial | F decai | C estabiliza |",
                  "|---|---|---|---|---|---|"]
        for s in structures:
            ratio = f"{s['c0_ratio']:.4f}" if s["c0_ratio"] is not None else "—"
            decay = f"{s['f_decay_ratio']:.3f}" if s["f_decay_ratio"] is not None else "—"
            lines.append(f"| {2 * math.pi / s['beta']:.4g} | {ratio} | {_mark(s['c0_ok'])} "
                         f"| {decay} | {_mark(s['f_decays'])} | {_mark(s['c_saturates'])} |")
    flagged = [(s.beta, s.flags) for s in (series or []) if s.flags]
    flagged += [(s["beta"], s["flags"]) for s in (structures or []) if s.get("flags")]
    if flagged:
        lines.append("")
        for beta, flags in flagged:
            lines += [f"> ⚠️ β={beta:.4g}: {flag}" for flag in flags]
    lines.append("")
    return "\n".join(lines)
