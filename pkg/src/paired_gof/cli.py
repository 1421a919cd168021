"""paired-gof CLI (argparse). Commands: fit, gof, select, simulate.

Exit status: 0 on success, 1 on usage or input errors, 2 on numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from paired_gof.bootstrap import BootstrapOptions, bootstrap_from_fit
from paired_gof.config import AppConfig, load_app_config, resolve_threads
from paired_gof.core.data import FrequencyTable, parse_frequency_table
from paired_gof.errors import ConvergenceError, NumericalError, PairedGofError, UsageError
from paired_gof.estimation import FitOptions, fit
from paired_gof.gof import ASYMPTOTIC_METHODS, GofMethod, GofResult, asymptotic_from_fit
from paired_gof.logging_config import bind_run_context, setup_logging
from paired_gof.models import ModelKind
from paired_gof.report import render_report, summarize_fit
from paired_gof.selection import DEFAULT_CANDIDATES, select_model
from paired_gof.simulation import (
    ALTERNATIVE_SIZE,
    NULL_SIZES,
    alternative_grid,
    load_scenarios,
    null_grid,
    run_grid,
)

logger = logging.getLogger(__name__)


@dataclass
class CommandSpec:
    """A fully resolved command: parsed flags merged over the configuration."""

    command: str
    input: Path | None = None
    models: list[ModelKind] = field(default_factory=lambda: list(DEFAULT_CANDIDATES))
    methods: list[GofMethod] = field(default_factory=lambda: list(ASYMPTOTIC_METHODS))
    seed: int | None = None
    n_boot: int = 2000
    max_regen: int = 100
    tol: float = 1e-6
    max_iter: int = 500
    format: str = "table"
    alpha: float = 0.05
    threshold: float = 0.05
    threads: int = 1
    processes: bool = False
    independence_k: str = "g"
    # simulate only
    grid: Path | None = None
    preset: str | None = None
    n_rep: int = 10_000
    sizes: list[int] | None = None
    cases: list[str] | None = None

    @property
    def fit_options(self) -> FitOptions:
        return FitOptions(tol=self.tol, max_iter=self.max_iter)

    @property
    def boot_options(self) -> BootstrapOptions:
        return BootstrapOptions(
            n_boot=self.n_boot,
            seed=self.seed,
            max_regen=self.max_regen,
            threads=self.threads,
            processes=self.processes,
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--seed", type=int, default=None, help="Required for bootstrap and simulation")
    common.add_argument("--n-boot", type=int, default=None, help="Bootstrap replicates")
    common.add_argument("--tol", type=float, default=None, help="Convergence threshold on the nuisance parameter")
    common.add_argument("--max-iter", type=int, default=None)
    common.add_argument("--threads", type=int, default=None, help="Worker threads (0 = one per CPU)")
    common.add_argument("--processes", action="store_true", help="Run bootstrap replicates in worker processes")
    common.add_argument("--log-level", default=None)
    common.add_argument("--log-json", action="store_true")
    common.add_argument(
        "--independence-k",
        choices=("g", "g+1"),
        default="g",
        help="Parameters charged to the independence model in degrees of freedom",
    )

    table_input = argparse.ArgumentParser(add_help=False)
    table_input.add_argument("--input", required=True, type=Path, help="Frequency table (.json or .csv)")
    table_input.add_argument("--model", default=None, help="Comma-separated models (default: all five)")

    parser = _Parser(prog="paired-gof", description="Goodness of fit for paired binary data")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sub.add_parser("fit", parents=[common, table_input], help="Maximum-likelihood fits")

    p_gof = sub.add_parser("gof", parents=[common, table_input], help="Goodness-of-fit p-values")
    p_gof.add_argument("--method", default="g2,x2,x2adj", help="Comma-separated methods or 'all'")

    p_select = sub.add_parser("select", parents=[common, table_input], help="AIC model selection")
    p_select.add_argument("--method", default="all", help="Comma-separated methods or 'all'")
    p_select.add_argument("--threshold", type=float, default=0.05)

    p_sim = sub.add_parser("simulate", parents=[common], help="Type I error and power studies")
    source = p_sim.add_mutually_exclusive_group(required=True)
    source.add_argument("--grid", type=Path, help="Scenario grid JSON")
    source.add_argument("--preset", choices=("null", "alternative"))
    p_sim.add_argument("--model", default=None, help="Generating model for --preset")
    p_sim.add_argument("--method", default="g2,x2,x2adj")
    p_sim.add_argument("--alpha", type=float, default=None)
    p_sim.add_argument("--n-rep", type=int, default=None)
    p_sim.add_argument("--sizes", default=None, help="Comma-separated per-group sizes")
    p_sim.add_argument("--cases", default=None, help="Comma-separated pi cases (I..VI)")
    return parser


def _parse_models(text: str | None, default: list[ModelKind]) -> list[ModelKind]:
    if not text:
        return list(default)
    try:
        return [ModelKind.parse(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_methods(text: str) -> list[GofMethod]:
    try:
        methods = GofMethod.parse_list(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not methods:
        raise UsageError("no methods given")
    return methods


def build_spec(args: argparse.Namespace, config: AppConfig) -> CommandSpec:
    """Merge parsed flags over the loaded configuration."""
    spec = CommandSpec(
        command=args.cmd,
        input=getattr(args, "input", None),
        seed=args.seed,
        n_boot=args.n_boot if args.n_boot is not None else config.bootstrap.n_boot,
        max_regen=config.bootstrap.max_regen,
        tol=args.tol if args.tol is not None else config.fit.tol,
        max_iter=args.max_iter if args.max_iter is not None else config.fit.max_iter,
        format=args.format,
        threads=resolve_threads(config) if args.threads is None else max(1, args.threads),
        processes=args.processes or config.bootstrap.processes,
        independence_k=args.independence_k,
    )
    if args.cmd in ("gof", "select", "simulate"):
        spec.methods = _parse_methods(args.method)
    if args.cmd == "select":
        spec.threshold = args.threshold
    if args.cmd == "simulate":
        spec.grid = args.grid
        spec.preset = args.preset
        spec.alpha = args.alpha if args.alpha is not None else config.simulation.alpha
        spec.n_rep = args.n_rep if args.n_rep is not None else config.simulation.n_rep
        spec.models = _parse_models(args.model, [])
        if args.sizes:
            spec.sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        if args.cases:
            spec.cases = [c.strip().upper() for c in args.cases.split(",") if c.strip()]
    else:
        spec.models = _parse_models(args.model, list(DEFAULT_CANDIDATES))

    if args.cmd != "fit" and spec.seed is None:
        if args.cmd == "simulate" and spec.grid is not None:
            pass  # the grid file may carry its own seed
        elif args.cmd == "simulate" or any(m.is_bootstrap for m in spec.methods):
            raise UsageError("--seed is required for bootstrap methods and simulations")
    return spec


def _read_table(path: Path) -> FrequencyTable:
    fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    return parse_frequency_table(path.read_text(encoding="utf-8"), fmt)


def _run_fit(spec: CommandSpec, table: FrequencyTable) -> str:
    summaries = [summarize_fit(fit(model, table, spec.fit_options), table) for model in spec.models]
    return render_report(summaries, spec.format)


def _run_gof(spec: CommandSpec, table: FrequencyTable) -> str:
    results: list[GofResult] = []
    for model in spec.models:
        fitted = fit(model, table, spec.fit_options)
        if not fitted.converged:
            raise ConvergenceError(f"{model.value}: fit did not converge after {fitted.iterations} iterations")
        boot = bootstrap_from_fit(fitted, table, spec.methods, spec.boot_options, spec.fit_options)
        for method in spec.methods:
            if method.is_bootstrap:
                results.append(boot[method])
            else:
                results.append(asymptotic_from_fit(fitted, table, method, spec.independence_k))
    return render_report(results, spec.format)


def _run_select(spec: CommandSpec, table: FrequencyTable) -> str:
    report = select_model(
        table,
        candidates=spec.models,
        methods=spec.methods,
        threshold=spec.threshold,
        fit_opts=spec.fit_options,
        boot_opts=spec.boot_options if spec.seed is not None else None,
        independence_k=spec.independence_k,
    )
    return render_report(report, spec.format)


def _run_simulate(spec: CommandSpec) -> str:
    boot = BootstrapOptions(n_boot=spec.n_boot, max_regen=spec.max_regen)
    seed = spec.seed
    if spec.grid is not None:
        file_seed, configs = load_scenarios(spec.grid.read_text(encoding="utf-8"))
        seed = seed if seed is not None else file_seed
        if seed is None:
            raise UsageError("--seed is required when the grid file has no seed")
    else:
        if len(spec.models) != 1:
            raise UsageError("--preset needs exactly one --model")
        overrides = dict(alpha=spec.alpha, n_rep=spec.n_rep, boot=boot, methods=tuple(spec.methods))
        if spec.preset == "null":
            configs = null_grid(spec.models[0], sizes=spec.sizes or NULL_SIZES, cases=spec.cases, **overrides)
        else:
            size = spec.sizes[0] if spec.sizes else ALTERNATIVE_SIZE
            configs = alternative_grid(spec.models[0], size=size, cases=spec.cases, **overrides)
    reports = run_grid(configs, seed, spec.fit_options, threads=spec.threads)
    return render_report(reports, spec.format)


def run_command(spec: CommandSpec, out: TextIO | None = None) -> int:
    """Execute *spec*, write the report to *out* and return the exit status."""
    out = out or sys.stdout
    try:
        if spec.command == "simulate":
            text = _run_simulate(spec)
        else:
            if spec.input is None:
                raise UsageError("--input is required")
            table = _read_table(spec.input)
            handler = {"fit": _run_fit, "gof": _run_gof, "select": _run_select}[spec.command]
            text = handler(spec, table)
    except NumericalError as exc:
        print(f"Numerical error: {exc}", file=sys.stderr)
        return 2
    except (PairedGofError, OSError, KeyError, ValueError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1
    out.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    config = load_app_config()
    try:
        args = _build_parser().parse_args(argv)
        setup_logging(level=args.log_level or config.log_level, json_output=args.log_json or config.log_json)
        spec = build_spec(args, config)
        bind_run_context(command=spec.command, seed=spec.seed)
    except UsageError as exc:
        print(f"Usage error: {exc}", file=sys.stderr)
        return 1
    except PairedGofError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1
    try:
        return run_command(spec)
    except KeyboardInterrupt:
        return 130
