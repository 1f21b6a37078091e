#!/usr/bin/env python3
"""
config.py
Configuração de execução: variáveis CHAOLOGY_* (.env), perfis desk/paper,
arquivo JSON opcional e overrides de linha de comando, nesta ordem.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from dotenv import load_dotenv

from scripts.errors import ConfigError
from scripts.model import PendulumParams

load_dotenv()

DEFAULT_MEMORY_GB = 8.0


def cache_dir() -> Path:
    return Path(os.getenv("CHAOLOGY_CACHE_DIR", "./cache"))


def output_dir() -> Path:
    return Path(os.getenv("CHAOLOGY_OUTPUT_DIR", "./reports"))


def memory_budget_bytes() -> int:
    raw = os.getenv("CHAOLOGY_MEMORY_BUDGET_GB", str(DEFAULT_MEMORY_GB))
    try:
        gb = float(raw)
    except ValueError as e:
        raise ConfigError(f"CHAOLOGY_MEMORY_BUDGET_GB inválido: {raw!r}") from e
    if not gb > 0:
        raise ConfigError(f"CHAOLOGY_MEMORY_BUDGET_GB deve ser > 0 (recebido {raw!r})")
    return int(gb * 1e9)


def default_threads() -> int:
    raw = os.getenv("CHAOLOGY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as e:
        raise ConfigError(f"CHAOLOGY_THREADS inválido: {raw!r}") from e


# ──────────────────────────────────────────
# Blocos de configuração
# ──────────────────────────────────────────

def _require(condition: bool, path: str, message: str):
    if not condition:
        raise ConfigError(f"{path}: {message}")


@dataclass(frozen=True)
class GridConfig:
    sizes: tuple = (48, 64)            # par (n_a, n_b) para a estimativa de erro
    stencil: str = "fourier"
    k_lowest: int | None = None
    reliable_threshold: float = 1e-4

    def validate(self, path: str = "grids"):
        _require(len(self.sizes) == 2, f"{path}.sizes", "precisa de exatamente dois tamanhos")
        _require(all(int(n) >= 3 for n in self.sizes), f"{path}.sizes", "tamanhos >= 3")
        _require(self.sizes[0] < self.sizes[1], f"{path}.sizes", "ordem crescente (n_a < n_b)")
        _require(self.stencil in ("fourier", "paper"), f"{path}.stencil", "fourier | paper")
        _require(self.k_lowest is None or self.k_lowest >= 1, f"{path}.k_lowest", ">= 1")
        _require(0 < self.reliable_threshold < 1, f"{path}.reliable_threshold", "em (0, 1)")


@dataclass(frozen=True)
class ClassicalConfig:
    t_max: float = 40.0
    dt: float = 0.01
    tol: float = 1e-8
    method: str = "RK45"
    epsilon: float = 1e-6 * math.pi
    fit_mode: str = "until-order-one"
    g_list: tuple = (1.0, 10.0, 100.0)
    preset: str | None = None

    def validate(self, path: str = "classical"):
        _require(self.t_max > 0, f"{path}.t_max", "> 0")
        _require(0 < self.dt <= self.t_max, f"{path}.dt", "em (0, t_max]")
        _require(0 < self.tol < 1, f"{path}.tol", "em (0, 1)")
        _require(self.method in ("RK45", "DOP853", "Radau"), f"{path}.method", "RK45 | DOP853 | Radau")
        _require(self.epsilon > 0, f"{path}.epsilon", "> 0")
        _require(self.fit_mode in ("until-order-one", "full-window"), f"{path}.fit_mode",
                 "until-order-one | full-window")
        _require(len(self.g_list) > 0 and all(g >= 0 for g in self.g_list), f"{path}.g_list",
                 "lista não vazia de g >= 0")


@dataclass(frozen=True)
class LevelStatsConfig:
    bins: int = 50
    scaling: str = "paper-hand-fit"
    unfold: bool = False
    poly_degree: int = 5
    parity_split: bool = False
    r2_by_parity: bool = True          # r=2 por setor de paridade, cada setor com média 1

    def validate(self, path: str = "levelstats"):
        _require(self.bins >= 1, f"{path}.bins", ">= 1")
        _require(self.scaling in ("paper-hand-fit", "unit-mean"), f"{path}.scaling",
                 "paper-hand-fit | unit-mean")
        _require(1 <= self.poly_degree <= 12, f"{path}.poly_degree", "em [1, 12]")


@dataclass(frozen=True)
class OtocConfig:
    M: int = 2000
    beta_exponents: tuple = (4, 5, 6, 7, 8)    # 2π/β = 2ᵉπ
    t_max: float = 20.0
    dt: float = 0.05
    fit_window: int = 10
    fit_target: str = "F"
    channel: int = 1
    c_form: str = "hermitian"
    position: str = "sin"              # W = sin θ (periódico) ou θ (salto em ±π)
    check_truncation: bool = True

    def validate(self, path: str = "otoc"):
        _require(self.M >= 2, f"{path}.M", ">= 2")
        _require(len(self.beta_exponents) > 0, f"{path}.beta_exponents", "lista não vazia")
        _require(self.t_max > 0 and 0 < self.dt <= self.t_max, f"{path}.dt", "em (0, t_max]")
        _require(self.fit_window >= 4, f"{path}.fit_window", ">= 4")
        _require(self.fit_target in ("F", "C"), f"{path}.fit_target", "F | C")
        _require(self.channel in (1, 2), f"{path}.channel", "1 | 2")
        _require(self.c_form in ("hermitian", "paper"), f"{path}.c_form", "hermitian | paper")
        _require(self.position in ("sin", "theta"), f"{path}.position", "sin | theta")


@dataclass(frozen=True)
class ComplexityBlock:
    epsilon: float = 1e-6
    ell_eff: float | None = None
    M: int | None = None
    t_max: float = 20.0
    dt: float = 0.1
    g_list: tuple = (10.0, 40.0, 90.0)
    centered: bool = False
    xi_scaling: str = "angles"
    mode: str = "double"

    def validate(self, path: str = "complexity"):
        _require(0 < self.epsilon < 1, f"{path}.epsilon", "em (0, 1)")
        _require(self.ell_eff is None or self.ell_eff > 0, f"{path}.ell_eff", "> 0")
        _require(self.t_max > 0 and 0 < self.dt <= self.t_max, f"{path}.dt", "em (0, t_max]")
        _require(len(self.g_list) > 0 and all(g > 0 for g in self.g_list), f"{path}.g_list",
                 "lista não vazia de g > 0")
        _require(self.xi_scaling in ("angles", "balanced"), f"{path}.xi_scaling", "angles | balanced")
        _require(self.mode in ("double", "single"), f"{path}.mode", "double | single")


@dataclass(frozen=True)
class RunConfig:
    params: PendulumParams = field(default_factory=PendulumParams)
    grids: GridConfig = field(default_factory=GridConfig)
    classical: ClassicalConfig = field(default_factory=ClassicalConfig)
    levelstats: LevelStatsConfig = field(default_factory=LevelStatsConfig)
    otoc: OtocConfig = field(default_factory=OtocConfig)
    complexity: ComplexityBlock = field(default_factory=ComplexityBlock)
    out_dir: str = ""
    plot: bool = False
    threads: int = 1
    profile: str = "desk"

    def validate(self) -> "RunConfig":
        for block in (self.grids, self.classical, self.levelstats, self.otoc, self.complexity):
            block.validate()
        _require(self.threads >= 1, "threads", ">= 1")
        _require(self.profile in PROFILES, "profile", f"um de {sorted(PROFILES)}")
        return self

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _build(cls, data, "").validate()

    def key(self, *sections: str) -> str:
        """md5 (12 hex) do JSON canônico das seções pedidas (todas por omissão)."""
        data = self.to_dict()
        if sections:
            data = {s: data[s] for s in sections}
        raw = json.dumps(data, sort_keys=True)
        return hashlib.md5(raw.encode()).hexdigest()[:12]


_NESTED = {
    "params": PendulumParams,
    "grids": GridConfig,
    "classical": ClassicalConfig,
    "levelstats": LevelStatsConfig,
    "otoc": OtocConfig,
    "complexity": ComplexityBlock,
}


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _build(cls, data: dict, prefix: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'config'}: esperado objeto JSON")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        dotted = ", ".join(f"{prefix}{k}" for k in unknown)
        raise ConfigError(f"chave(s) desconhecida(s): {dotted}")

    kwargs = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if cls is RunConfig and key in _NESTED:
            nested = _NESTED[key]
            if nested is PendulumParams:
                try:
                    kwargs[key] = PendulumParams.from_dict(value)
                except (TypeError, ValueError) as e:
                    raise ConfigError(f"{path}: {e}") from e
            else:
                kwargs[key] = _build(nested, value, f"{path}.")
        elif isinstance(value, list):
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{prefix or 'config'}: {e}") from e


# ──────────────────────────────────────────
# Perfis e resolução
# ──────────────────────────────────────────

PROFILES = {
    "desk": {
        "grids": {"sizes": [48, 64]},
    },
    "paper": {
        "grids": {"sizes": [141, 173]},
        "otoc": {"t_max": 200.0, "dt": 0.1},
        "complexity": {"t_max": 200.0, "dt": 0.5},
    },
}


def deep_merge(base: dict, override: dict) -> dict:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"arquivo de configuração não encontrado: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: JSON inválido ({e})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: esperado objeto JSON no topo")
    if is_manifest(data):
        # manifest.json de uma execução anterior: só o bloco de configuração é reaplicado
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: bloco config do manifest não é um objeto")
    return data


def is_manifest(data: dict) -> bool:
    return data.get("tool") == "chaology" and "config" in data


def resolve(profile: str = "desk", config_path: str | Path | None = None,
            overrides: dict | None = None) -> RunConfig:
    """Padrões ← perfil ← arquivo JSON ← flags; valida antes de devolver."""
    if profile not in PROFILES:
        raise ConfigError(f"perfil desconhecido: {profile} (use {sorted(PROFILES)})")
    data = {"profile": profile, "threads": default_threads(), "out_dir": str(output_dir())}
    data = deep_merge(data, PROFILES[profile])
    if config_path:
        data = deep_merge(data, load_config_file(config_path))
    if overrides:
        data = deep_merge(data, overrides)
    return RunConfig.from_dict(data)
