#!/usr/bin/env python3
"""
levelstats.py
Estatística de espaçamentos: NNSD (r=1) e NNNSD (r=2), templates GOE e
Poisson, distâncias de Kolmogorov–Smirnov, unfolding polinomial da escada
espectral e separação por setores de paridade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import stats

from scripts.errors import FitDegenerate, InsufficientData
from scripts.spectral import parity_permutation

DEFAULT_BINS      = 50
MIN_KS_SPACINGS   = 200
PARITY_CUTOFF     = 0.9
SCALINGS          = ("paper-hand-fit", "unit-mean")

# Constantes do template de Poisson ajustadas à mão (não normalizado)
PAPER_POISSON_AMPLITUDE = 5.0
PAPER_POISSON_RATE      = 2 * math.pi


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class SpacingDistribution:
    spacings: np.ndarray
    r: int
    edges: np.ndarray
    density: np.ndarray
    normalization: str = "raw"     # raw | unit-mean
    unfolded: bool = False
    parity_resolved: bool = False

    @property
    def count(self) -> int:
        return int(self.spacings.size)


@dataclass(frozen=True)
class TemplateFit:
    ks_goe: float
    ks_poisson: float
    verdict: str
    scaling: str
    r: int
    n_spacings: int
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "r": self.r, "ks_goe": self.ks_goe, "ks_poisson": self.ks_poisson,
            "verdict": self.verdict, "n_spacings": self.n_spacings,
            "scaling": self.scaling, "note": self.note,
        }


@dataclass(frozen=True)
class ParitySplit:
    even: np.ndarray           # índices dos níveis
    odd: np.ndarray
    unclassified: np.ndarray
    expectation: np.ndarray    # ⟨Ψₙ|P|Ψₙ⟩

    def eigenvalues(self, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return values[self.even], values[self.odd]


# ──────────────────────────────────────────
# Templates
# ──────────────────────────────────────────

def goe_template(x):
    x = np.asarray(x, dtype=float)
    return (math.pi * x / 2) * np.exp(-math.pi * x ** 2 / 4)


def poisson_template_paper(x):
    """5·e^{−2πx}: escala vertical ajustada à mão, integral 5/(2π) ≠ 1."""
    return PAPER_POISSON_AMPLITUDE * np.exp(-PAPER_POISSON_RATE * np.asarray(x, dtype=float))


def poisson_template_unit(x):
    return np.exp(-np.asarray(x, dtype=float))


def goe_cdf(x):
    return 1.0 - np.exp(-math.pi * np.asarray(x, dtype=float) ** 2 / 4)


def poisson_paper_cdf(x):
    # template ajustado à mão, normalizado como densidade: 2π·e^{−2πx}
    return 1.0 - np.exp(-PAPER_POISSON_RATE * np.asarray(x, dtype=float))


def poisson_unit_cdf(x):
    return 1.0 - np.exp(-np.asarray(x, dtype=float))


# ──────────────────────────────────────────
# Espaçamentos e unfolding
# ──────────────────────────────────────────

def _histogram(values: np.ndarray, bins: int) -> tuple[np.ndarray, np.ndarray]:
    top = float(values.max()) if values.size and values.max() > 0 else 1.0
    density, edges = np.histogram(values, bins=bins, range=(0.0, top), density=True)
    return edges, density


def spacings(eigenvalues, r: int = 1, reliable_count: int | None = None,
             normalization: str = "raw", bins: int = DEFAULT_BINS,
             unfolded: bool = False) -> SpacingDistribution:
    """sᵢ = Eᵢ − Eᵢ₋ᵣ restrito aos `reliable_count` níveis mais baixos."""
    values = np.sort(np.asarray(eigenvalues, dtype=float))
    count = values.size if reliable_count is None else min(int(reliable_count), values.size)
    if r < 1:
        raise ValueError("ordem r deve ser >= 1")
    if count < r + 2:
        raise InsufficientData(f"{count} níveis confiáveis; mínimo {r + 2} para r={r}")
    if normalization not in ("raw", "unit-mean"):
        raise ValueError(f"normalização desconhecida: {normalization}")

    window = values[:count]
    s = window[r:] - window[:-r]
    if normalization == "unit-mean":
        s = s / s.mean()
    edges, density = _histogram(s, bins)
    return SpacingDistribution(spacings=s, r=r, edges=edges, density=density,
                               normalization=normalization, unfolded=unfolded)


def unfold(eigenvalues, poly_degree: int = 5) -> np.ndarray:
    """εₙ = N̄(Eₙ), com N̄ o ajuste polinomial da escada N(E) = #{Eₙ ≤ E}."""
    if not 1 <= poly_degree <= 12:
        raise ValueError("poly_degree deve estar em [1, 12]")
    values = np.sort(np.asarray(eigenvalues, dtype=float))
    if values.size < poly_degree + 2:
        raise FitDegenerate(f"{values.size} níveis não sustentam grau {poly_degree}")
    staircase = np.arange(1, values.size + 1, dtype=float)
    poly, (_, rank, _, _) = Polynomial.fit(values, staircase, poly_degree, full=True)
    if rank < poly_degree + 1:
        raise FitDegenerate(f"ajuste da escada com posto {rank} < {poly_degree + 1}")
    return poly(values)


def sector_spacings(eigenvalues, split: "ParitySplit", r: int = 1,
                    reliable_count: int | None = None, bins: int = DEFAULT_BINS,
                    poly_degree: int | None = None) -> SpacingDistribution:
    """
    Espaçamentos de ordem r dentro de cada setor de paridade, agrupados.
    Pares quase degenerados de paridades opostas não entram em nenhum sᵢ.
    Cada setor é reescalado para média 1 (ou desdobrado com `poly_degree`)
    antes do agrupamento; níveis sem classe ficam de fora.
    """
    if r < 1:
        raise ValueError("ordem r deve ser >= 1")
    values = np.asarray(eigenvalues, dtype=float)
    count = values.size if reliable_count is None else min(int(reliable_count), values.size)
    pieces = []
    for index in (split.even, split.odd):
        sector = np.sort(values[index[index < count]])
        if sector.size < r + 2:
            continue
        if poly_degree is not None:
            sector = unfold(sector, poly_degree)
        s = sector[r:] - sector[:-r]
        pieces.append(s if poly_degree is not None else s / s.mean())
    if not pieces:
        raise InsufficientData(f"nenhum setor de paridade com {r + 2} níveis confiáveis")
    s = np.concatenate(pieces)
    edges, density = _histogram(s, bins)
    return SpacingDistribution(spacings=s, r=r, edges=edges, density=density,
                               normalization="unit-mean", unfolded=poly_degree is not None,
                               parity_resolved=True)


# ──────────────────────────────────────────
# Comparação com templates
# ──────────────────────────────────────────

def ks_distance(sample, reference) -> float:
    """KS contra uma CDF (callable) ou contra outra amostra (array)."""
    sample = np.asarray(sample, dtype=float)
    if callable(reference):
        return float(stats.kstest(sample, reference).statistic)
    return float(stats.ks_2samp(sample, np.asarray(reference, dtype=float)).statistic)


def effective_scaling(dist: SpacingDistribution, scaling: str) -> str:
    """Espaçamentos desdobrados ou já com média 1 só se comparam com os moldes unit-mean."""
    if scaling not in SCALINGS:
        raise ValueError(f"scaling desconhecido: {scaling} (use {SCALINGS})")
    if dist.unfolded or dist.normalization == "unit-mean":
        return "unit-mean"
    return scaling


def compare_templates(dist: SpacingDistribution, scaling: str = "paper-hand-fit") -> TemplateFit:
    """
    `paper-hand-fit`: espaçamentos crus contra o molde GOE e o template de Poisson
    ajustado à mão (normalizado para densidade antes do KS).
    `unit-mean`: espaçamentos reescalados para média 1 contra GOE e e^{−s}.
    Distribuições desdobradas, normalizadas ou por setor usam sempre `unit-mean`.
    """
    requested = scaling
    scaling = effective_scaling(dist, scaling)
    if dist.count < MIN_KS_SPACINGS:
        raise InsufficientData(f"{dist.count} espaçamentos; mínimo {MIN_KS_SPACINGS}")

    if scaling == "unit-mean":
        x = dist.spacings / dist.spacings.mean()
        poisson_cdf, note = poisson_unit_cdf, ""
        if requested != scaling:
            note = "espaçamentos com média 1: moldes unit-mean no lugar de paper-hand-fit"
        if dist.parity_resolved:
            note = (note + "; " if note else "") + "setores de paridade separados"
    else:
        x = dist.spacings
        poisson_cdf = poisson_paper_cdf
        note = ("template de Poisson 5e^{-2πx} tem escala vertical arbitrária; "
                "normalizado para 2πe^{-2πx} antes do KS")

    ks_goe = ks_distance(x, goe_cdf)
    ks_poisson = ks_distance(x, poisson_cdf)
    return TemplateFit(
        ks_goe=ks_goe,
        ks_poisson=ks_poisson,
        verdict="GOE" if ks_goe < ks_poisson else "Poisson",
        scaling=scaling,
        r=dist.r,
        n_spacings=dist.count,
        note=note,
    )


def histogram_rows(dist: SpacingDistribution, scaling: str = "paper-hand-fit") -> list[dict]:
    """Linhas (bin_lo, bin_hi, density, goe_density, poisson_density) nas unidades do histograma."""
    centers = 0.5 * (dist.edges[:-1] + dist.edges[1:])
    if effective_scaling(dist, scaling) == "unit-mean":
        scale = dist.spacings.mean()
        goe = goe_template(centers / scale) / scale
        poisson = poisson_template_unit(centers / scale) / scale
    else:
        goe = goe_template(centers)
        poisson = poisson_template_paper(centers)
    return [
        {"bin_lo": lo, "bin_hi": hi, "density": d, "goe_density": g, "poisson_density": p}
        for lo, hi, d, g, p in zip(dist.edges[:-1], dist.edges[1:], dist.density, goe, poisson)
    ]


# ──────────────────────────────────────────
# Paridade
# ──────────────────────────────────────────

def parity_expectations(eig) -> np.ndarray:
    perm = parity_permutation(eig.grid)
    vectors = eig.eigenvectors
    return eig.weight * np.einsum("kn,kn->n", vectors, vectors[perm])


def split_parity(eig, cutoff: float = PARITY_CUTOFF) -> ParitySplit:
    """Classifica Ψₙ pelo sinal de ⟨Ψₙ|P|Ψₙ⟩; |⟨P⟩| < cutoff fica sem classe."""
    expectation = parity_expectations(eig)
    return ParitySplit(
        even=np.nonzero(expectation >= cutoff)[0],
        odd=np.nonzero(expectation <= -cutoff)[0],
        unclassified=np.nonzero(np.abs(expectation) < cutoff)[0],
        expectation=expectation,
    )


# ──────────────────────────────────────────
# Markdown
# ──────────────────────────────────────────

def to_markdown(fits: list[TemplateFit], parity: ParitySplit | None = None) -> str:
    lines = ["## Estatística de Níveis", ""]
    lines += ["| r | scaling | KS GOE | KS Poisson | veredito | espaçamentos |",
              "|---|---|---|---|---|---|"]
    for fit in fits:
        lines.append(f"| {fit.r} | {fit.scaling} | {fit.ks_goe:.4f} | {fit.ks_poisson:.4f} "
                     f"| **{fit.verdict}** | {fit.n_spacings} |")
    notes = sorted({fit.note for fit in fits if fit.note})
    if notes:
        lines.append("")
        lines += [f"> ⚠️ {note}" for note in notes]
    if parity is not None:
        lines.append("")
        lines.append(f"**Paridade:** {parity.even.size} pares · {parity.odd.size} ímpares · "
                     f"{parity.unclassified.size} sem classe")
    lines.append("")
    return "\n".join(lines)
