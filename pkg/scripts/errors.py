#!/usr/bin/env python3
"""
errors.py
Hierarquia de exceções do chaology.
Toda falha nomeada pelos módulos herda de ChaologyError, para que o
orquestrador converta em {"status": "error", ...} num único ponto.
"""


class ChaologyError(Exception):
    """Raiz de todas as falhas de domínio."""


class ChaologyWarning(UserWarning):
    """Diagnóstico suave: o resultado existe, mas carrega uma flag."""


# ──────────────────────────────────────────
# Configuração
# ──────────────────────────────────────────

class ConfigError(ChaologyError):
    pass


# ──────────────────────────────────────────
# Dinâmica clássica
# ──────────────────────────────────────────

class StepFailure(ChaologyError):
    """O controlador de passo não atingiu a tolerância pedida."""


class InsufficientData(ChaologyError):
    pass


# ──────────────────────────────────────────
# Hamiltoniano discreto e autovalores
# ──────────────────────────────────────────

class DimensionOverflow(ChaologyError):
    """A matriz pedida não cabe no orçamento de memória configurado."""


class ConvergenceFailure(ChaologyError):
    pass


class ParamMismatch(ChaologyError):
    pass


class RangeError(ChaologyError):
    pass


class GridMismatch(ChaologyError):
    pass


class CacheError(ChaologyError):
    pass


class ChecksumMismatch(CacheError):
    pass


class VersionMismatch(CacheError):
    pass


class TruncatedFile(CacheError):
    pass


# ──────────────────────────────────────────
# Diagnósticos
# ──────────────────────────────────────────

class FitDegenerate(ChaologyError):
    pass


class TruncationError(ChaologyError):
    pass


class OverflowGuard(ChaologyError):
    pass


class NoConvergence(ChaologyError):
    """Ajuste não-linear falhou; `diagnostics` guarda o contexto."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SingularReference(ChaologyError):
    pass


class NonPositiveDelta(ChaologyError):
    pass
