#!/usr/bin/env python3
"""
csv_writer.py
Emissão dos CSVs com os contratos de colunas de references/output-spec.md:
separador decimal '.', fim de linha '\\n', cabeçalho obrigatório.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd

COLUMNS = {
    "trajectory":    ["t", "theta1", "theta2", "p1", "p2", "energy"],
    "divergence":    ["t", "delta_omega_std", "delta_omega_paper"],
    "sweep":         ["g", "lambda", "t_star", "rms"],
    "eigenvalues":   ["n", "E_n", "error_ratio"],
    "level_density": ["E_lo", "E_hi", "density"],
    "histogram":     ["bin_lo", "bin_hi", "density", "goe_density", "poisson_density"],
    "otoc":          ["t", "ReF", "ImF", "C"],
    "cc":            ["t", "C"],
}

FLOAT_FORMAT = "%.12g"


def write_table(path: Path, kind: str, data) -> Path:
    """Grava `data` (dict de colunas ou lista de linhas) com as colunas exatas de `kind`."""
    columns = COLUMNS[kind]
    frame = pd.DataFrame(data)
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise KeyError(f"{kind}: colunas ausentes {missing}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame[columns].to_csv(path, index=False, lineterminator="\n",
                          float_format=FLOAT_FORMAT, na_rep="nan")
    return path


# ──────────────────────────────────────────
# Adaptadores por módulo
# ──────────────────────────────────────────

def trajectory_table(traj) -> dict:
    return {
        "t": traj.times,
        "theta1": traj.states[:, 0], "theta2": traj.states[:, 1],
        "p1": traj.states[:, 2], "p2": traj.states[:, 3],
        "energy": traj.energy,
    }


def divergence_table(series) -> dict:
    return {"t": series.times, "delta_omega_std": series.delta_omega,
            "delta_omega_paper": series.delta_omega_paper}


def sweep_table(rows: list[dict]) -> list[dict]:
    def value(row, key):
        v = row.get(key)
        return float("nan") if v is None else float(v)

    return [{"g": float(r["g"]), "lambda": value(r, "lambda"), "t_star": value(r, "t_star"),
             "rms": value(r, "rms")} for r in rows]


def eigenvalue_table(eig, errors=None) -> dict:
    ratios = np.full(eig.count, np.nan)
    if errors is not None:
        known = errors.ratios[:eig.count]
        ratios[:known.size] = known
    return {"n": np.arange(eig.count), "E_n": eig.eigenvalues, "error_ratio": ratios}


def level_density_table(eigenvalues, bins: int = 50) -> dict:
    density, edges = np.histogram(eigenvalues, bins=bins, density=True)
    return {"E_lo": edges[:-1], "E_hi": edges[1:], "density": density}


def otoc_table(series) -> dict:
    return {"t": series.times, "ReF": series.F.real, "ImF": series.F.imag, "C": series.C}


def cc_table(series) -> dict:
    return {"t": series.times, "C": series.C}


def otoc_filename(beta: float, channel: int = 1) -> str:
    """Etiqueta 2π/β em múltiplos de π: β = 2π/(16π) → otoc-16pi.csv."""
    tag = f"{(2 * math.pi / beta) / math.pi:g}pi"
    suffix = "" if channel == 1 else f"-ch{channel}"
    return f"otoc-{tag}{suffix}.csv"


def cc_filename(g: float) -> str:
    return f"cc-g{g:g}.csv"
