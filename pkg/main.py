#!/usr/bin/env python3
"""
main.py
Orquestrador principal do chaology: caologia clássica e quântica do pêndulo
duplo de hastes. Resolve a configuração, executa os módulos, usa o cache de
autopares e grava CSVs, JSONs, manifest.json e report.md por comando.
"""

import argparse
import json
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from dotenv import load_dotenv

# Adicionar raiz ao path
sys.path.insert(0, str(Path(__file__).parent))

load_dotenv()

from scripts import classical, complexity, eigen, levelstats, otoc, spectral  # noqa: E402
from scripts.config import RunConfig, cache_dir, resolve  # noqa: E402
from scripts.errors import CacheError, ChaologyError, ChaologyWarning, InsufficientData  # noqa: E402
from scripts.output import csv_writer, markdown_builder  # noqa: E402

VERSION = markdown_builder.VERSION


# ──────────────────────────────────────────
# Helpers de linha de comando
# ──────────────────────────────────────────

def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"lista de números inválida: {text!r}") from e


def _int_range(text: str) -> list[int]:
    """'4..8' → [4, 5, 6, 7, 8]; '4,6' → [4, 6]."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"faixa inválida: {text!r} (use 4..8 ou 4,5,6)") from e


def _overrides(args: argparse.Namespace) -> dict:
    """Flags explícitas viram um dict no formato do RunConfig (aplicado por último)."""
    data: dict = {}

    def put(path: str, value):
        if value is None:
            return
        node = data
        *parents, leaf = path.split(".")
        for key in parents:
            node = node.setdefault(key, {})
        node[leaf] = value

    put("out_dir", args.out)
    put("threads", args.threads)
    if args.plot:
        put("plot", True)
    put("params.hbar", getattr(args, "hbar", None))
    put("grids.sizes", getattr(args, "grids", None))
    put("grids.stencil", getattr(args, "stencil", None))

    g = getattr(args, "g", None)
    if g is not None:
        if args.command == "classical" and args.action == "sweep-g":
            put("classical.g_list", g)
        elif args.command == "cc":
            put("complexity.g_list", g)
        else:
            put("params.g", g[0])

    put("classical.preset", getattr(args, "preset", None))
    put("classical.t_max", getattr(args, "t_max", None))
    put("levelstats.scaling", getattr(args, "scaling", None))
    if getattr(args, "unfold", False):
        put("levelstats.unfold", True)
    if getattr(args, "parity", False):
        put("levelstats.parity_split", True)
    if getattr(args, "full_spectrum", False):
        put("levelstats.r2_by_parity", False)
    put("otoc.beta_exponents", getattr(args, "beta_exp", None))
    put("otoc.M", getattr(args, "M", None))
    put("otoc.channel", getattr(args, "channel", None))
    put("otoc.c_form", getattr(args, "c_form", None))
    put("otoc.position", getattr(args, "position", None))
    put("otoc.fit_target", getattr(args, "fit_target", None))
    put("complexity.epsilon", getattr(args, "epsilon", None))
    put("complexity.xi_scaling", getattr(args, "xi_scaling", None))
    if getattr(args, "centered", False):
        put("complexity.centered", True)
    if getattr(args, "single", False):
        put("complexity.mode", "single")
    return data


def _new_context(args: argparse.Namespace, cfg: RunConfig) -> dict:
    return {
        "command":    args.command,
        "subcommand": args.action,
        "profile":    cfg.profile,
        "config":     cfg.to_dict(),
        "highlights": {},
        "sections":   [],
        "warnings":   [],
        "files":      [],
        "cache":      {"hits": 0, "misses": 0, "checksums": {}},
    }


def _out_dir(cfg: RunConfig, command: str) -> Path:
    out = Path(cfg.out_dir) / command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_csv(ctx: dict, out: Path, name: str, kind: str, data) -> Path:
    path = csv_writer.write_table(out / name, kind, data)
    ctx["files"].append(name)
    return path


def _write_json(ctx: dict, out: Path, name: str, payload) -> Path:
    path = out / name
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, default=float) + "\n",
                    encoding="utf-8")
    ctx["files"].append(name)
    return path


def _plot(ctx: dict, cfg: RunConfig, out: Path, name: str, render, *payload):
    if not cfg.plot:
        return
    from scripts.output import svg_plots
    render_fn = getattr(svg_plots, render)
    render_fn(*payload, out / name)
    ctx["files"].append(name)


def _finish(ctx: dict, cfg: RunConfig, out: Path, started: float):
    ctx["duration_seconds"] = round(time.time() - started, 2)
    manifest = {
        "tool":          "chaology",
        "version":       VERSION,
        "command":       ctx["command"],
        "subcommand":    ctx["subcommand"],
        "config":        ctx["config"],
        "cache":         ctx["cache"]["checksums"],
        "files":         sorted(ctx["files"]),
        "created_utc":   datetime.now(timezone.utc).isoformat(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    markdown_builder.build(ctx, out / "report.md")
    for w in ctx["warnings"]:
        print(f"  ⚠️  {w}")
    print(f"\n✅ Concluído em {ctx['duration_seconds']}s → {out}")


# ──────────────────────────────────────────
# Autopares com cache
# ──────────────────────────────────────────

def _eigenpairs(ctx: dict, cfg: RunConfig, params, n: int, kind: str = "double"):
    """Carrega do cache ou resolve e grava; arquivo corrompido é ignorado, nunca reescrito."""
    grid = spectral.make_grid(n, 1 if kind == "single" else n)
    stencil = cfg.grids.stencil
    key = eigen.cache_key(params, grid, stencil, cfg.grids.k_lowest, kind)
    path = eigen.cache_path(cache_dir(), key)

    if path.exists():
        try:
            eig = eigen.load_cache(path)
            ctx["cache"]["hits"] += 1
            ctx["cache"]["checksums"][path.name] = eigen.file_checksum(path)
            print(f"  ♻️  cache {path.name} ({n}×{grid.n2})")
            return eig
        except CacheError as e:
            ctx["warnings"].append(f"cache {path.name} ignorado: {e}")
            corrupt = True
    else:
        corrupt = False

    print(f"  ⚙️  Resolvendo H em {n}×{grid.n2} (dim {grid.dim})...")
    if kind == "single":
        h = spectral.assemble_single_pendulum(params, n, stencil)
    else:
        h = spectral.assemble_hamiltonian(params, grid, stencil)
    eig = eigen.solve(h, cfg.grids.k_lowest)
    ctx["cache"]["misses"] += 1
    if not corrupt:
        eigen.save_cache(eig, path)
        ctx["cache"]["checksums"][path.name] = eigen.file_checksum(path)
    return eig


def _reliable_pair(ctx: dict, cfg: RunConfig, params):
    n_a, n_b = cfg.grids.sizes
    eig_a = _eigenpairs(ctx, cfg, params, int(n_a))
    eig_b = _eigenpairs(ctx, cfg, params, int(n_b))
    errors = eigen.estimate_errors(eig_a, eig_b, cfg.grids.reliable_threshold)
    return eig_a, eig_b, errors


# ──────────────────────────────────────────
# Comandos
# ──────────────────────────────────────────

def cmd_classical(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx, out, started = _new_context(args, cfg), _out_dir(cfg, "classical"), time.time()
    c = cfg.classical
    params = cfg.params
    if c.preset:
        params = classical.PRESETS[c.preset].with_changes(hbar=params.hbar)
    print(f"\n🚀 classical {args.action} — m=({params.m1:g},{params.m2:g}) "
          f"ℓ=({params.l1:g},{params.l2:g}) g={params.g:g}")

    if args.action == "simulate":
        ic_a, ic_b = classical.trajectory_initial_conditions(1e-6)
        traj_a = classical.integrate(params, ic_a, c.t_max, c.dt, c.tol, c.method)
        traj_b = classical.integrate(params, ic_b, c.t_max, c.dt, c.tol, c.method)
        _write_csv(ctx, out, "trajectory.csv", "trajectory", csv_writer.trajectory_table(traj_a))
        _write_csv(ctx, out, "trajectory-perturbed.csv", "trajectory",
                   csv_writer.trajectory_table(traj_b))
        drift = max(traj_a.energy_drift, traj_b.energy_drift)
        ctx["highlights"]["drift de energia"] = f"{drift:.2e}"
        ctx["sections"].append(classical.to_markdown(drift=drift))
        _plot(ctx, cfg, out, "trajectory.svg", "plot_trajectory", traj_a)

    elif args.action == "lyapunov":
        ic_a, ic_b = classical.lyapunov_initial_conditions(c.epsilon)
        series = classical.divergence(params, ic_a, ic_b, None, c.t_max, c.dt, c.tol, c.method)
        fits = {mode: classical.fit_lyapunov(series, mode, literal=args.paper_literal)
                for mode in ("full-window", "until-order-one")}
        _write_csv(ctx, out, "divergence.csv", "divergence", csv_writer.divergence_table(series))
        _write_json(ctx, out, "lyapunov-fit.json", {
            "k": series.k, "energy_drift": series.energy_drift,
            "paper_literal": args.paper_literal,
            "fits": {mode: fit.to_dict() for mode, fit in fits.items()},
        })
        chosen = fits[c.fit_mode]
        ctx["highlights"]["λ_L"] = f"{chosen.lambda_L:.4f}"
        ctx["highlights"]["t*"] = f"{chosen.t_star:.3f}" if chosen.t_star is not None else "—"
        ctx["sections"].append(classical.to_markdown(fits=fits, drift=series.energy_drift))
        _plot(ctx, cfg, out, "divergence.svg", "plot_divergence", series, fits)

    else:
        rows = classical.sweep_g(params, list(c.g_list), None, None, c.t_max, c.dt, c.tol,
                                 c.method, c.fit_mode, workers=cfg.threads)
        _write_csv(ctx, out, "sweep.csv", "sweep", csv_writer.sweep_table(rows))
        _write_json(ctx, out, "sweep.json", rows)
        failed = [r for r in rows if r["status"] != "ok"]
        for r in failed:
            ctx["warnings"].append(f"g={r['g']:g}: {r.get('message', 'erro')}")
        ctx["highlights"]["linhas"] = f"{len(rows) - len(failed)}/{len(rows)}"
        ctx["sections"].append(classical.to_markdown(sweep=rows))
        _plot(ctx, cfg, out, "sweep.svg", "plot_sweep", rows)

    _finish(ctx, cfg, out, started)
    return 0


def cmd_quantize(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx, out, started = _new_context(args, cfg), _out_dir(cfg, "quantize"), time.time()
    params = cfg.params
    print(f"\n🚀 quantize {args.action} — grades {list(cfg.grids.sizes)} stencil {cfg.grids.stencil}")

    errors = None
    if args.action == "spectrum":
        eig = _eigenpairs(ctx, cfg, params, int(cfg.grids.sizes[1]))
    else:
        _, eig, errors = _reliable_pair(ctx, cfg, params)
        ctx["highlights"]["níveis confiáveis"] = errors.reliable_count
        print(f"  📊 Níveis confiáveis (≤ {errors.threshold:.0e}): {errors.reliable_count}")

    _write_csv(ctx, out, "eigenvalues.csv", "eigenvalues", csv_writer.eigenvalue_table(eig, errors))
    _write_csv(ctx, out, "level-density.csv", "level_density",
               csv_writer.level_density_table(eig.eigenvalues))

    fit = None
    top = errors.reliable_count if errors is not None else eig.count
    if top >= 4:
        fit = eigen.fit_linear_spectrum(eig, top // 2, top - 1)
        _write_json(ctx, out, "spectrum-fit.json", {
            "slope": fit.slope, "intercept": fit.intercept, "rms": fit.rms,
            "n_lo": fit.n_lo, "n_hi": fit.n_hi,
            "reliable_count": errors.reliable_count if errors is not None else None,
        })
        ctx["highlights"]["Eₙ ≈ a·n + b"] = f"{fit.slope:.5f}·n + {fit.intercept:.5f}"
    ctx["highlights"]["E₀"] = f"{eig.eigenvalues[0]:.8f}"
    ctx["sections"].append(eigen.to_markdown(eig, errors, fit))
    _plot(ctx, cfg, out, "spectrum.svg", "plot_spectrum", eig, errors)
    _finish(ctx, cfg, out, started)
    return 0


def cmd_stats(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx, out, started = _new_context(args, cfg), _out_dir(cfg, "stats"), time.time()
    ls = cfg.levelstats
    r = args.r if args.r is not None else (1 if args.action == "nnsd" else 2)
    print(f"\n🚀 stats {args.action} — r={r} scaling={ls.scaling}")

    _, eig, errors = _reliable_pair(ctx, cfg, cfg.params)
    parity = levelstats.split_parity(eig) if (ls.parity_split or r == 2 and ls.r2_by_parity) else None
    if r == 2 and ls.r2_by_parity:
        dist = levelstats.sector_spacings(eig.eigenvalues, parity, r, errors.reliable_count,
                                          bins=ls.bins, poly_degree=ls.poly_degree if ls.unfold else None)
        print("  🧭 r=2 por setor de paridade (moldes unit-mean)")
    else:
        values = eig.eigenvalues
        if ls.unfold:
            values = levelstats.unfold(values[:errors.reliable_count], ls.poly_degree)
        dist = levelstats.spacings(values, r, errors.reliable_count, bins=ls.bins, unfolded=ls.unfold)
    fit = levelstats.compare_templates(dist, ls.scaling)
    rows = levelstats.histogram_rows(dist, ls.scaling)
    _write_csv(ctx, out, f"histogram-r{r}.csv", "histogram", rows)
    _write_json(ctx, out, f"levelstats-r{r}.json", fit.to_dict())

    if ls.parity_split:
        for label, index in (("even", parity.even), ("odd", parity.odd)):
            sector = index[index < errors.reliable_count]
            try:
                sub = levelstats.spacings(eig.eigenvalues[sector], r, bins=ls.bins)
                _write_json(ctx, out, f"levelstats-r{r}-{label}.json",
                            levelstats.compare_templates(sub, ls.scaling).to_dict())
            except ChaologyError as e:
                ctx["warnings"].append(f"setor {label}: {e}")

    ctx["highlights"]["veredito"] = fit.verdict
    ctx["highlights"]["KS GOE / Poisson"] = f"{fit.ks_goe:.4f} / {fit.ks_poisson:.4f}"
    ctx["sections"].append(levelstats.to_markdown([fit], parity))
    _plot(ctx, cfg, out, f"histogram-r{r}.svg", "plot_histogram", rows, fit)
    _finish(ctx, cfg, out, started)
    return 0


def cmd_otoc(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx, out, started = _new_context(args, cfg), _out_dir(cfg, "otoc"), time.time()
    oc = cfg.otoc
    print(f"\n🚀 otoc {args.action} — 2π/β ∈ {{{', '.join(f'2^{e}π' for e in oc.beta_exponents)}}}")

    _, eig, errors = _reliable_pair(ctx, cfg, cfg.params)
    M = min(oc.M, errors.reliable_count)
    if M < 2:
        raise InsufficientData(f"apenas {errors.reliable_count} níveis confiáveis para o OTOC")
    c, w = oc.channel, oc.position
    kinds = [f"{w}{c}", f"p{c}", f"p{c}sq", f"{w}{c}sq"]
    ops = {kind: otoc.operator_matrix(eig, kind, M, errors.reliable_count) for kind in kinds}
    defect = otoc.momentum_square_defect(ops[f"p{c}"], ops[f"p{c}sq"])
    ctx["highlights"]["M"] = M
    ctx["highlights"]["W"] = f"sin θ{c}" if w == "sin" else f"θ{c}"
    ctx["highlights"]["‖p² − p·p‖ (bloco M/2)"] = f"{defect:.3e}"

    n_steps = int(round(oc.t_max / oc.dt))
    times = [i * oc.dt for i in range(n_steps + 1)]
    betas = otoc.beta_grid(oc.beta_exponents)

    def run_beta(beta):
        series = otoc.otoc_series(ops, eig.eigenvalues, beta, times, M, c, oc.c_form, w)
        if oc.check_truncation and M >= 4:
            change = otoc.truncation_stability(ops, eig.eigenvalues, beta, times, M, c, oc.c_form, w)
            otoc.mark_convergence(series, change)
        return series

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            all_series = list(pool.map(run_beta, betas))
    else:
        all_series = [run_beta(beta) for beta in betas]

    fits, structures = [], []
    for series in all_series:
        name = csv_writer.otoc_filename(series.beta, c)
        _write_csv(ctx, out, name, "otoc", csv_writer.otoc_table(series))
        ctx["warnings"] += [f"β={series.beta:.4g}: {flag}" for flag in series.flags]
        reference = otoc.commutator_origin(eig, series.beta, M, c, w)
        structure = otoc.structure_report(series, reference)
        _write_json(ctx, out, name.replace(".csv", "-structure.json"), structure)
        ctx["warnings"] += [f"β={series.beta:.4g}: {flag}" for flag in structure["flags"]]
        structures.append(structure)
        fit = None
        if args.action == "fit":
            fit = otoc.fit_otoc_short_time(series, oc.fit_window, oc.fit_target, eig.params.hbar)
            report = {**fit.to_dict(), **otoc.mss_report(fit), "converged": series.converged}
            _write_json(ctx, out, name.replace(".csv", "-fit.json"), report)
            fits.append(fit)
        _plot(ctx, cfg, out, name.replace(".csv", ".svg"), "plot_otoc", series, fit)

    if fits:
        best = max(fits, key=lambda f: f.saturation_ratio)
        ctx["highlights"]["maior razão MSS"] = f"{best.saturation_ratio:.3e}"
    ctx["sections"].append(otoc.to_markdown(fits, all_series, structures))
    _finish(ctx, cfg, out, started)
    return 0


def cmd_cc(args: argparse.Namespace, cfg: RunConfig) -> int:
    ctx, out, started = _new_context(args, cfg), _out_dir(cfg, "cc"), time.time()
    cc = cfg.complexity
    print(f"\n🚀 cc compute — g ∈ {list(cc.g_list)} ε={cc.epsilon:g} modo {cc.mode}")

    config = complexity.ComplexityConfig(
        epsilon=cc.epsilon, ell_eff=cc.ell_eff, M=cc.M, centered=cc.centered,
        xi_scaling=cc.xi_scaling, mode=cc.mode,
    )
    n = int(cfg.grids.sizes[1])
    n_steps = int(round(cc.t_max / cc.dt))
    times = [i * cc.dt for i in range(n_steps + 1)]

    runs = {}
    for g in cc.g_list:
        params = cfg.params.with_changes(g=float(g))
        eig_h = _eigenpairs(ctx, cfg, params, n, cc.mode)
        eig_hp = _eigenpairs(ctx, cfg, complexity.perturbed_hamiltonian(params, cc.epsilon), n, cc.mode)
        series = complexity.complexity_series(eig_h, eig_hp, config, times, workers=cfg.threads)
        runs[float(g)] = series
        _write_csv(ctx, out, csv_writer.cc_filename(g), "cc", csv_writer.cc_table(series))
        _write_json(ctx, out, csv_writer.cc_filename(g).replace(".csv", "-fit.json"),
                    {**series.report(float(g)), "gaussianity_deficit": series.gaussianity_deficit})
        ctx["warnings"] += [f"g={g:g}: {flag}" for flag in series.flags]
        if series.linear_fit is not None:
            print(f"  📈 g={g:g}: λ={series.linear_fit.slope:.4g} (R²={series.linear_fit.r2:.3f})")

    ctx["sections"].append(complexity.to_markdown(runs))
    _plot(ctx, cfg, out, "cc.svg", "plot_complexity", runs)
    _finish(ctx, cfg, out, started)
    return 0


# ──────────────────────────────────────────
# Parser
# ──────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Arquivo JSON de configuração")
    common.add_argument("--out", help="Diretório de saída (padrão: CHAOLOGY_OUTPUT_DIR)")
    common.add_argument("--plot", action="store_true", help="Gerar figuras SVG")
    common.add_argument("--threads", type=int, help="Workers paralelos (padrão: CHAOLOGY_THREADS)")
    common.add_argument("--profile", choices=["desk", "paper"], default="desk")
    common.add_argument("--g", type=_float_list, help="g (ou lista 1,10,100 em sweep-g e cc)")
    common.add_argument("--hbar", type=float)
    common.add_argument("--grids", type=lambda s: [int(v) for v in _float_list(s)],
                        help="Par de tamanhos de grade, ex.: 48,64")
    common.add_argument("--stencil", choices=list(spectral.STENCILS))

    parser = argparse.ArgumentParser(
        prog="chaology",
        description="Caologia clássica e quântica do pêndulo duplo de hastes",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p_classical = commands.add_parser("classical", help="Dinâmica clássica")
    a_classical = p_classical.add_subparsers(dest="action", required=True)
    sim = a_classical.add_parser("simulate", parents=[common])
    sim.add_argument("--preset", choices=sorted(classical.PRESETS))
    sim.add_argument("--t-max", type=float)
    lyap = a_classical.add_parser("lyapunov", parents=[common])
    lyap.add_argument("--paper-literal", action="store_true",
                      help="Ajustar sobre δΩ como diferença de normas")
    lyap.add_argument("--t-max", type=float)
    sweep = a_classical.add_parser("sweep-g", parents=[common])
    sweep.add_argument("--t-max", type=float)
    sweep.set_defaults(g_required=True)
    p_classical.set_defaults(handler=cmd_classical)

    p_quantize = commands.add_parser("quantize", help="Espectro quântico")
    a_quantize = p_quantize.add_subparsers(dest="action", required=True)
    a_quantize.add_parser("spectrum", parents=[common])
    a_quantize.add_parser("errors", parents=[common])
    p_quantize.set_defaults(handler=cmd_quantize)

    p_stats = commands.add_parser("stats", help="Estatística de níveis")
    a_stats = p_stats.add_subparsers(dest="action", required=True)
    for name in ("nnsd", "nnnsd"):
        sp = a_stats.add_parser(name, parents=[common])
        sp.add_argument("--r", type=int, choices=[1, 2])
        sp.add_argument("--scaling", choices=list(levelstats.SCALINGS))
        sp.add_argument("--unfold", action="store_true")
        sp.add_argument("--parity", action="store_true", help="Estatística por setor de paridade")
        sp.add_argument("--full-spectrum", action="store_true",
                        help="r=2 sobre o espectro inteiro, sem separar paridades")
    p_stats.set_defaults(handler=cmd_stats)

    p_otoc = commands.add_parser("otoc", help="OTOC térmico")
    a_otoc = p_otoc.add_subparsers(dest="action", required=True)
    for name in ("compute", "fit"):
        sp = a_otoc.add_parser(name, parents=[common])
        sp.add_argument("--beta-exp", type=_int_range, help="Expoentes e com 2π/β = 2ᵉπ, ex.: 4..8")
        sp.add_argument("--M", type=int)
        sp.add_argument("--channel", type=int, choices=[1, 2])
        sp.add_argument("--c-form", choices=list(otoc.C_FORMS))
        sp.add_argument("--position", choices=list(otoc.POSITIONS),
                        help="W = sin θ (padrão) ou o ângulo θ")
        sp.add_argument("--fit-target", choices=["F", "C"])
    p_otoc.set_defaults(handler=cmd_otoc)

    p_cc = commands.add_parser("cc", help="Complexidade de circuito")
    a_cc = p_cc.add_subparsers(dest="action", required=True)
    comp = a_cc.add_parser("compute", parents=[common])
    comp.add_argument("--epsilon", type=float)
    comp.add_argument("--centered", action="store_true")
    comp.add_argument("--xi-scaling", choices=list(complexity.XI_SCALINGS))
    comp.add_argument("--single", action="store_true", help="Pêndulo simples (θ₂ ≡ 0)")
    p_cc.set_defaults(handler=cmd_cc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "g_required", False) and args.g is None:
        parser.error("classical sweep-g requer --g (ex.: --g 1,10,100)")

    try:
        cfg = resolve(args.profile, args.config, _overrides(args))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ChaologyWarning)
            code = args.handler(args, cfg)
        for w in caught:
            if issubclass(w.category, ChaologyWarning):
                print(f"  ⚠️  {w.message}")
            else:
                warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
        return code
    except (ChaologyError, ValueError) as e:
        payload = {"status": "error", "error": type(e).__name__, "message": str(e)}
        print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
