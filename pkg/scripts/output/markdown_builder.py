#!/usr/bin/env python3
"""
markdown_builder.py
Monta o report.md de cada execução a partir das seções Markdown que os
módulos renderizam (to_markdown) e dos metadados do orquestrador.

Segue a especificação definida em references/output-spec.md.
"""

import json
from datetime import date, datetime
from pathlib import Path

VERSION = "1.0"


# ──────────────────────────────────────────
# Helpers
# ──────────────────────────────────────────

def _today() -> str:
    return date.today().isoformat()


def _fmt_verdict(verdict: str) -> str:
    if verdict == "GOE":
        return "GOE 🌀"
    if verdict == "Poisson":
        return "Poisson 📐"
    return verdict or "N/D"


# ──────────────────────────────────────────
# Seções do relatório
# ──────────────────────────────────────────

def _build_frontmatter(ctx: dict) -> str:
    params = ctx.get("config", {}).get("params", {})
    grids = ctx.get("config", {}).get("grids", {})
    return f"""---
ferramenta: chaology
versao: "{VERSION}"
comando: {ctx.get("command", "")}
subcomando: {ctx.get("subcommand", "")}
perfil: {ctx.get("profile", "desk")}
data: {_today()}
parametros: {json.dumps(params, sort_keys=True)}
grades: {json.dumps(grids.get("sizes", []))}
stencil: {grids.get("stencil", "fourier")}
---"""


def _build_header(ctx: dict) -> str:
    command = " ".join(filter(None, [ctx.get("command"), ctx.get("subcommand")]))
    return (
        f"# Relatório de Caologia — {command}\n"
        f"**Data:** {_today()} | **Perfil:** {ctx.get('profile', 'desk')}\n"
    )


def _build_summary(ctx: dict) -> str:
    highlights = ctx.get("highlights", {})
    if not highlights:
        return ""
    lines = ["## RESUMO", "", "| Grandeza | Valor |", "|---|---|"]
    for label, value in highlights.items():
        if label == "veredito":
            value = _fmt_verdict(value)
        lines.append(f"| {label} | {value} |")
    lines.append("")
    return "\n".join(lines)


def _build_warnings(ctx: dict) -> str:
    warnings = ctx.get("warnings", [])
    if not warnings:
        return ""
    lines = ["## AVISOS", ""]
    lines += [f"⚠️ {w}" for w in warnings]
    lines.append("")
    return "\n".join(lines)


def _build_files(ctx: dict) -> str:
    files = ctx.get("files", [])
    if not files:
        return ""
    lines = ["## ARQUIVOS GERADOS", ""]
    lines += [f"- `{name}`" for name in files]
    lines.append("")
    return "\n".join(lines)


def _build_execution_metadata(ctx: dict) -> str:
    meta = {
        "version":                    VERSION,
        "execution_date":             datetime.now().isoformat(),
        "execution_duration_seconds": ctx.get("duration_seconds", 0),
        "threads":                    ctx.get("config", {}).get("threads", 1),
        "cache":                      ctx.get("cache", {}),
        "warnings":                   ctx.get("warnings", []),
    }
    return (
        "## METADADOS DE EXECUÇÃO\n\n"
        "```json\n"
        + json.dumps(meta, ensure_ascii=False, indent=2)
        + "\n```\n"
    )


# ──────────────────────────────────────────
# Builder principal
# ──────────────────────────────────────────

def build(ctx: dict, output_path: Path) -> str:
    """
    Monta o relatório e grava em `output_path`.

    ctx esperado:
      command, subcommand, profile, config (RunConfig.to_dict()),
      highlights, sections (Markdown dos módulos), warnings, files,
      cache, duration_seconds
    """
    parts = [_build_frontmatter(ctx), "", _build_header(ctx), "---", ""]
    for block in [_build_summary(ctx), *ctx.get("sections", []), _build_warnings(ctx),
                  _build_files(ctx)]:
        if block:
            parts += [block, "---", ""]
    parts.append(_build_execution_metadata(ctx))
    report = "\n".join(parts)

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(report, encoding="utf-8")
    return report
