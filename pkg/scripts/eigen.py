#!/usr/bin/env python3
"""
eigen.py
Autopares do Hamiltoniano discreto: eigensolve denso simétrico, estimativa
de erro por razão diferença/soma entre duas resoluções, ajuste linear do
espectro alto e cache binário versionado (formato DPND).
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import crcmod.predefined
import numpy as np
import scipy.linalg

from scripts.errors import (
    CacheError, ChecksumMismatch, ConvergenceFailure, ParamMismatch, RangeError,
    TruncatedFile, VersionMismatch,
)
from scripts.model import PendulumParams
from scripts.spectral import Grid2D, HamiltonianMatrix, make_grid, parity_permutation

CACHE_MAGIC     = b"DPND"
CACHE_VERSION   = 1
DEGENERACY_TOL  = 1e-10
RELIABLE_RATIO  = 1e-4

_PREFIX = struct.Struct("<4sIQ")
_TRAILER = struct.Struct("<Q")
_crc64 = crcmod.predefined.mkPredefinedCrcFun("crc-64-we")


# ──────────────────────────────────────────
# Tipos de domínio
# ──────────────────────────────────────────

@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray            # (count,) crescente
    eigenvectors: np.ndarray           # (dim, count), Σ Ψ²·weight = 1
    grid: Grid2D
    params: PendulumParams
    stencil: str = "fourier"
    kind: str = "double"

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def weight(self) -> float:
        return self.grid.weight

    def header(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "grid": self.grid.to_dict(),
            "hbar": self.params.hbar,
            "count": self.count,
            "dim": self.grid.dim,
            "stencil": self.stencil,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class ErrorEstimate:
    level: int
    ratio: float


@dataclass
class ErrorReport:
    estimates: list[ErrorEstimate]
    threshold: float = RELIABLE_RATIO
    reliable_count: int = field(init=False)

    def __post_init__(self):
        self.reliable_count = self.count_below(self.threshold)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([e.ratio for e in self.estimates])

    def count_below(self, threshold: float) -> int:
        """Maior n tal que todos os níveis abaixo de n têm razão ≤ threshold."""
        ratios = self.ratios
        bad = np.nonzero(~(ratios <= threshold))[0]
        return int(bad[0]) if bad.size else int(ratios.size)


@dataclass(frozen=True)
class SpectrumFit:
    slope: float
    intercept: float
    rms: float
    n_lo: int
    n_hi: int


# ──────────────────────────────────────────
# Eigensolve
# ──────────────────────────────────────────

def _clusters(values: np.ndarray, tol: float) -> list[np.ndarray]:
    gaps = np.diff(values) < tol
    clusters, start = [], 0
    for i, close in enumerate(gaps):
        if not close:
            if i > start:
                clusters.append(np.arange(start, i + 1))
            start = i + 1
    if values.size - 1 > start:
        clusters.append(np.arange(start, values.size))
    return clusters


def _orient(values: np.ndarray, vectors: np.ndarray, grid: Grid2D) -> np.ndarray:
    """
    Orientação determinística: subespaços degenerados giram para autovetores
    da paridade; depois cada coluna tem a maior componente positiva.
    """
    perm = parity_permutation(grid)
    for idx in _clusters(values, DEGENERACY_TOL):
        block = vectors[:, idx]
        overlap = block.T @ block[perm]
        overlap = 0.5 * (overlap + overlap.T)
        _, rotation = np.linalg.eigh(overlap)
        vectors[:, idx] = block @ rotation
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    vectors *= signs
    return vectors


def solve(h: HamiltonianMatrix, k_lowest: int | None = None) -> EigenDecomposition:
    if not np.array_equal(h.entries, h.entries.T):
        raise ValueError("Hamiltoniano não é exatamente simétrico")
    subset = None
    if k_lowest is not None:
        if not 1 <= k_lowest <= h.dim:
            raise RangeError(f"k_lowest={k_lowest} fora de [1, {h.dim}]")
        subset = [0, k_lowest - 1]
    try:
        values, vectors = scipy.linalg.eigh(h.entries, subset_by_index=subset)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise ConvergenceFailure(f"eigh não convergiu: {e}") from e

    vectors = _orient(values, np.ascontiguousarray(vectors), h.grid)
    vectors /= np.sqrt(h.grid.weight)
    return EigenDecomposition(
        eigenvalues=values, eigenvectors=vectors, grid=h.grid,
        params=h.params, stencil=h.stencil, kind=h.kind,
    )


def residual_norms(h: HamiltonianMatrix, eig: EigenDecomposition) -> np.ndarray:
    """‖HΨₙ − EₙΨₙ‖₂ / max(1, |Eₙ|) com Ψₙ de norma euclidiana 1."""
    unit = eig.eigenvectors / np.linalg.norm(eig.eigenvectors, axis=0)
    res = h.entries @ unit - unit * eig.eigenvalues
    return np.linalg.norm(res, axis=0) / np.maximum(1.0, np.abs(eig.eigenvalues))


def degenerate_levels(values: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Índices n com Eₙ₊₁ − Eₙ ≤ tol."""
    return np.nonzero(np.diff(values) <= tol)[0]


# ──────────────────────────────────────────
# Estimativa de erro e espectro linear
# ──────────────────────────────────────────

def estimate_errors(a: EigenDecomposition, b: EigenDecomposition,
                    threshold: float = RELIABLE_RATIO) -> ErrorReport:
    """Razão |Eₙᴬ − Eₙᴮ| / (Eₙᴬ + Eₙᴮ) nível a nível."""
    if a.params != b.params:
        raise ParamMismatch(f"parâmetros diferem: {a.params} vs {b.params}")
    count = min(a.count, b.count)
    ea, eb = a.eigenvalues[:count], b.eigenvalues[:count]
    diff = np.abs(ea - eb)
    total = ea + eb
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(diff == 0, 0.0, diff / np.abs(total))
    estimates = [ErrorEstimate(level=n, ratio=float(r)) for n, r in enumerate(ratios)]
    return ErrorReport(estimates=estimates, threshold=threshold)


def _eigenvalues_of(eig) -> np.ndarray:
    if isinstance(eig, EigenDecomposition):
        return eig.eigenvalues
    return np.asarray(eig, dtype=float)


def fit_linear_spectrum(eig, n_lo: int, n_hi: int) -> SpectrumFit:
    """Mínimos quadrados Eₙ ≈ slope·n + intercept sobre n ∈ [n_lo, n_hi]."""
    values = _eigenvalues_of(eig)
    if n_hi >= values.size:
        raise RangeError(f"n_hi={n_hi} excede os {values.size} níveis disponíveis")
    if not 0 <= n_lo < n_hi:
        raise RangeError(f"janela inválida [{n_lo}, {n_hi}]")
    n = np.arange(n_lo, n_hi + 1)
    slope, intercept = np.polyfit(n, values[n_lo:n_hi + 1], 1)
    residual = values[n_lo:n_hi + 1] - (slope * n + intercept)
    return SpectrumFit(
        slope=float(slope), intercept=float(intercept),
        rms=float(np.sqrt(np.mean(residual ** 2))), n_lo=n_lo, n_hi=n_hi,
    )


# ──────────────────────────────────────────
# Cache binário
# ──────────────────────────────────────────

def cache_key(params: PendulumParams, grid: Grid2D, stencil: str, k_lowest: int | None,
              kind: str = "double") -> str:
    raw = json.dumps({
        "params": params.to_dict(), "grid": grid.to_dict(), "stencil": stencil,
        "k": k_lowest, "kind": kind, "version": CACHE_VERSION,
    }, sort_keys=True)
    return hashlib.md5(raw.encode()).hexdigest()[:12]


def cache_path(cache_dir: Path, key: str) -> Path:
    return Path(cache_dir) / f"eigen-{key}.dpnd"


def file_checksum(path: Path) -> str:
    """CRC-64 gravado no trailer, em hexadecimal (para manifests)."""
    with open(path, "rb") as f:
        f.seek(-_TRAILER.size, os.SEEK_END)
        (crc,) = _TRAILER.unpack(f.read(_TRAILER.size))
    return f"{crc:016x}"


def save_cache(eig: EigenDecomposition, path: Path) -> Path:
    """Escrita atômica: arquivo temporário no mesmo diretório, depois rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps(eig.header(), sort_keys=True).encode()
    values = np.ascontiguousarray(eig.eigenvalues, dtype="<f8").tobytes()
    vectors = np.asarray(eig.eigenvectors, dtype="<f8").tobytes(order="F")
    payload = header + values + vectors

    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".eigen-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(_PREFIX.pack(CACHE_MAGIC, CACHE_VERSION, len(header)))
            f.write(payload)
            f.write(_TRAILER.pack(_crc64(payload)))
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def load_cache(path: Path) -> EigenDecomposition:
    data = Path(path).read_bytes()
    if len(data) < _PREFIX.size:
        raise TruncatedFile(f"{path}: menor que o prefixo")
    magic, version, header_len = _PREFIX.unpack_from(data, 0)
    if magic != CACHE_MAGIC:
        raise CacheError(f"{path}: magic inválido {magic!r}")
    if version != CACHE_VERSION:
        raise VersionMismatch(f"{path}: versão {version}, esperada {CACHE_VERSION}")

    start = _PREFIX.size
    if len(data) < start + header_len:
        raise TruncatedFile(f"{path}: header incompleto")
    try:
        header = json.loads(data[start:start + header_len])
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ChecksumMismatch(f"{path}: header ilegível ({e})") from e

    count, dim = int(header["count"]), int(header["dim"])
    values_at = start + header_len
    vectors_at = values_at + 8 * count
    trailer_at = vectors_at + 8 * count * dim
    if len(data) < trailer_at + _TRAILER.size:
        raise TruncatedFile(f"{path}: header anuncia {count}×{dim} entradas além do fim do arquivo")
    if len(data) > trailer_at + _TRAILER.size:
        raise CacheError(f"{path}: bytes extras após o trailer")

    (stored,) = _TRAILER.unpack_from(data, trailer_at)
    if _crc64(data[start:trailer_at]) != stored:
        raise ChecksumMismatch(f"{path}: CRC-64 não confere")

    values = np.frombuffer(data, dtype="<f8", count=count, offset=values_at).astype(float)
    vectors = np.frombuffer(data, dtype="<f8", count=count * dim, offset=vectors_at)
    vectors = vectors.reshape((dim, count), order="F").astype(float)
    grid = make_grid(int(header["grid"]["n1"]), int(header["grid"]["n2"]))
    return EigenDecomposition(
        eigenvalues=values, eigenvectors=vectors, grid=grid,
        params=PendulumParams.from_dict(header["params"]),
        stencil=header.get("stencil", "fourier"), kind=header.get("kind", "double"),
    )


# ──────────────────────────────────────────
# Markdown
# ──────────────────────────────────────────

def to_markdown(eig: EigenDecomposition, errors: ErrorReport | None = None,
                fit: SpectrumFit | None = None) -> str:
    lines = ["## Espectro", ""]
    lines.append(f"**Grade:** {eig.grid.n1}×{eig.grid.n2} (dim {eig.grid.dim}) · "
                 f"**stencil:** {eig.stencil} · **níveis:** {eig.count}")
    lines.append(f"**E₀:** {eig.eigenvalues[0]:.8f}")
    if errors is not None:
        lines.append(f"**Níveis confiáveis (razão ≤ {errors.threshold:.0e}):** {errors.reliable_count}")
        lines.append(f"**Níveis com razão ≤ 1e-3:** {errors.count_below(1e-3)}")
    if fit is not None:
        lines.append(f"**Ajuste linear:** Eₙ ≈ {fit.slope:.5f}·n + {fit.intercept:.5f} "
                     f"(n ∈ [{fit.n_lo}, {fit.n_hi}], rms {fit.rms:.2e})")
    lines.append("")
    return "\n".join(lines)
