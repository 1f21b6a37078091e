#!/usr/bin/env python3
"""
svg_plots.py
Figuras SVG opcionais (--plot): trajetórias, divergência com os dois ajustes
de Lyapunov, varredura em g, espectro, histogramas NNSD/NNNSD, séries OTOC e
complexidade. Conveniência visual; os CSVs são os artefatos de referência.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "chaology"
_METADATA = {"Date": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_METADATA)
    plt.close(fig)
    return path


# ──────────────────────────────────────────
# Clássico
# ──────────────────────────────────────────

def plot_trajectory(traj, path: Path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(traj.times, traj.lifted[:, 0], label="θ₁")
    ax.plot(traj.times, traj.lifted[:, 1], label="θ₂")
    ax.set_xlabel("t")
    ax.set_ylabel("ângulo (rad)")
    ax.set_title(title or "Trajetória")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_divergence(series, fits: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    with np.errstate(divide="ignore"):
        ax.plot(series.times, np.log10(series.delta_omega), color="black", lw=0.8, label="lg δΩ")
    colors = {"full-window": "red", "until-order-one": "green"}
    for mode, fit in fits.items():
        lo, hi = fit.fit_window
        t = np.linspace(lo, hi, 50)
        ax.plot(t, fit.a1 + fit.a2 * t, color=colors.get(mode, "blue"),
                label=f"{mode}: λ={fit.lambda_L:.3f}")
    ax.axhline(0.0, color="gray", ls=":")
    ax.set_xlabel("t")
    ax.set_ylabel("lg δΩ")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_sweep(rows: list[dict], path: Path) -> Path:
    ok = [r for r in rows if r.get("status") == "ok"]
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    g = [r["g"] for r in ok]
    axes[0].plot(g, [r["lambda"] for r in ok], "o-")
    axes[0].set_ylabel("λ")
    axes[1].plot(g, [r["t_star"] for r in ok], "s-")
    axes[1].set_ylabel("t*")
    for ax in axes:
        ax.set_xscale("log")
        ax.set_xlabel("g")
        ax.grid(True, alpha=0.3)
    return _save(fig, path)


# ──────────────────────────────────────────
# Espectro e estatística
# ──────────────────────────────────────────

def plot_spectrum(eig, errors, path: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    n = np.arange(eig.count)
    axes[0].plot(n, eig.eigenvalues, lw=0.8)
    axes[0].set_xlabel("n")
    axes[0].set_ylabel("Eₙ")
    if errors is not None:
        with np.errstate(divide="ignore"):
            axes[1].plot(np.arange(errors.ratios.size), np.log10(errors.ratios), lw=0.6)
        axes[1].axhline(math.log10(errors.threshold), color="red", ls="--")
    axes[1].set_xlabel("n")
    axes[1].set_ylabel("lg razão de erro")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_histogram(rows: list[dict], fit, path: Path) -> Path:
    lo = np.array([r["bin_lo"] for r in rows])
    hi = np.array([r["bin_hi"] for r in rows])
    centers = 0.5 * (lo + hi)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(lo, [r["density"] for r in rows], width=hi - lo, align="edge", alpha=0.5, label="dados")
    ax.plot(centers, [r["goe_density"] for r in rows], color="red", label="GOE")
    ax.plot(centers, [r["poisson_density"] for r in rows], color="blue", label="Poisson")
    ax.set_xlabel("s")
    ax.set_ylabel("P(s)")
    if fit is not None:
        ax.set_title(f"r={fit.r}: KS GOE {fit.ks_goe:.3f} · KS Poisson {fit.ks_poisson:.3f}")
    ax.legend()
    return _save(fig, path)


# ──────────────────────────────────────────
# OTOC e complexidade
# ──────────────────────────────────────────

def plot_otoc(series, fit, path: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    axes[0].plot(series.times, series.F.real, ".", ms=3, label="Re F")
    if fit is not None:
        t = np.linspace(fit.window[0], fit.window[1], 50)
        axes[0].plot(t, fit.a + fit.b * np.exp(fit.lambda_q * t), color="red",
                     label=f"λ^q={fit.lambda_q:.3f}")
    axes[0].set_ylabel("F(t)")
    axes[1].plot(series.times, series.C, lw=0.8)
    axes[1].set_ylabel("C(t)")
    for ax in axes:
        ax.set_xlabel("t")
        ax.grid(True, alpha=0.3)
    axes[0].legend()
    fig.suptitle(f"2π/β = {2 * math.pi / series.beta / math.pi:g}π")
    return _save(fig, path)


def plot_complexity(runs: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for g, series in sorted(runs.items()):
        ax.plot(series.times, series.C, lw=0.8, label=f"g={g:g}")
        fit = series.linear_fit
        if fit is not None:
            t = np.linspace(fit.window[0], fit.window[1], 20)
            ax.plot(t, fit.intercept + fit.slope * t, ls="--", color="gray")
    ax.set_xlabel("t")
    ax.set_ylabel("𝒞(t)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _save(fig, path)
