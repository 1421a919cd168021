"""JSON and aligned-text rendering of fits, tests, selections and simulation rates."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Literal, Sequence

from paired_gof.core.data import FrequencyTable
from paired_gof.errors import NumericalError
from paired_gof.estimation import FitResult
from paired_gof.gof import GofResult
from paired_gof.models import ModelKind, correlation
from paired_gof.selection import SelectionReport, aic
from paired_gof.simulation import RateReport

ReportFormat = Literal["json", "table"]


@dataclass(frozen=True)
class FitSummary:
    """A fit together with the table-dependent quantities shown to users."""

    fit: FitResult
    labels: tuple[str, ...]
    aic: float
    correlations: tuple[float | None, ...]


def summarize_fit(result: FitResult, table: FrequencyTable) -> FitSummary:
    corr: list[float | None] = []
    for pi in result.params.pis:
        if result.model is ModelKind.SATURATED or pi is None or not 0.0 < pi < 1.0:
            corr.append(None)
            continue
        try:
            corr.append(correlation(result.model, pi, result.params.kappa))
        except NumericalError:
            corr.append(None)
    try:
        value = aic(result, table)
    except NumericalError:
        value = math.nan
    return FitSummary(fit=result, labels=tuple(table.labels), aic=value, correlations=tuple(corr))


# ── JSON ──────────────────────────────────────────────────────────


def _fit_json(summary: FitSummary) -> dict[str, Any]:
    fit = summary.fit
    groups = []
    for i, label in enumerate(summary.labels):
        entry: dict[str, Any] = {"label": label, "pi": fit.params.pis[i], "correlation": summary.correlations[i]}
        if fit.params.joint is not None:
            joint = fit.params.joint[i]
            entry["joint"] = None if joint is None else list(joint.as_tuple())
        groups.append(entry)
    return {
        "model": fit.model.value,
        "kappa": fit.params.kappa,
        "nuisance": fit.model.nuisance_symbol,
        "groups": groups,
        "loglik": fit.loglik,
        "loglik_const": fit.loglik_const,
        "aic": summary.aic,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "boundary": fit.boundary,
    }


def _gof_json(result: GofResult) -> dict[str, Any]:
    return {
        "model": result.model.value,
        "method": result.method.label,
        "statistic": result.statistic,
        "dof": result.dof,
        "p_value": result.p_value,
        "n_boot": result.n_boot,
        "n_extreme": result.n_extreme,
        "n_ties": result.n_ties,
        "failed_replicates": result.failed_replicates,
        "boundary": result.boundary,
    }


def _selection_json(report: SelectionReport) -> dict[str, Any]:
    return {
        "models": [
            {
                "name": a.model.value,
                "pvalues": {m.label: p for m, p in a.p_values.items()},
                "aic": a.aic,
                "k": a.k,
                "pass": a.passed,
                "reasons": list(a.reasons),
            }
            for a in report.assessments
        ],
        "best": report.best.value if report.best else None,
        "threshold": report.threshold,
        "diagnostics": list(report.diagnostics),
    }


def _rate_json(report: RateReport) -> dict[str, Any]:
    cfg = report.scenario
    return {
        "scenario": cfg.label,
        "model": cfg.model.value,
        "fitted_model": cfg.fitted.value,
        "pis": list(cfg.pis),
        "kappa": list(cfg.kappa) if isinstance(cfg.kappa, tuple) else cfg.kappa,
        "m_plus": cfg.m_plus,
        "n_plus": cfg.n_plus,
        "alpha": cfg.alpha,
        "n_rep": report.n_rep,
        "failed": report.failed,
        "rates": {
            r.method.label: {"rate": r.rate, "se": r.se, "classification": r.classification}
            for r in report.rates
        },
    }


def _to_json(item: Any) -> Any:
    if isinstance(item, FitSummary):
        return _fit_json(item)
    if isinstance(item, GofResult):
        return _gof_json(item)
    if isinstance(item, SelectionReport):
        return _selection_json(item)
    if isinstance(item, RateReport):
        return _rate_json(item)
    raise TypeError(f"cannot render {type(item).__name__}")


# ── Text tables ───────────────────────────────────────────────────


def _fmt(value: float | None, digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return f"{value:.{digits}f}"


def _align(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(line, widths)).rstrip() for line in (header, *rows)]
    return "\n".join(lines) + "\n"


def _fit_table(items: Sequence[FitSummary]) -> str:
    out = []
    for s in items:
        fit = s.fit
        kappa = "-" if fit.params.kappa is None else f"{fit.model.nuisance_symbol}={fit.params.kappa:.6f}"
        flags = "" if fit.converged else " (not converged)"
        flags += " (boundary)" if fit.boundary else ""
        out.append(
            f"{fit.model.display_name}: loglik={_fmt(fit.loglik)} AIC={_fmt(s.aic)} {kappa} "
            f"iterations={fit.iterations}{flags}\n"
        )
        rows = []
        for i, label in enumerate(s.labels):
            pi = fit.params.pis[i]
            rows.append([label, "-" if pi is None else f"{pi:.6f}", _fmt(s.correlations[i])])
        out.append(_align(["group", "pi", "correlation"], rows))
    return "\n".join(out)


def _gof_table(items: Sequence[GofResult]) -> str:
    rows = [
        [
            r.model.display_name,
            r.method.label,
            _fmt(r.statistic),
            "-" if r.dof is None else str(r.dof),
            _fmt(r.p_value),
            "-" if r.n_boot is None else str(r.n_boot),
        ]
        for r in items
    ]
    return _align(["model", "method", "statistic", "dof", "p-value", "n_boot"], rows)


def _selection_table(report: SelectionReport) -> str:
    header = ["model", *(m.label for m in report.methods), "AIC", "pass"]
    rows = []
    for a in report.assessments:
        pvals = [_fmt(a.p_values.get(m)) for m in report.methods]
        rows.append([a.model.display_name, *pvals, _fmt(a.aic), "yes" if a.passed else "no"])
    text = _align(header, rows)
    text += f"best: {report.best.value if report.best else 'none'}\n"
    for line in report.diagnostics:
        text += f"note: {line}\n"
    return text


def _rate_table(items: Sequence[RateReport]) -> str:
    methods: list = []
    for rep in items:
        for r in rep.rates:
            if r.method not in methods:
                methods.append(r.method)
    header = ["scenario", "N", *(m.label for m in methods)]
    rows = []
    for rep in items:
        by_method = {r.method: r for r in rep.rates}
        cells = []
        for m in methods:
            r = by_method.get(m)
            cells.append("-" if r is None else f"{100 * r.rate:.2f} {r.classification[0].upper()}")
        rows.append([rep.scenario.label, str(rep.n_rep), *cells])
    return _align(header, rows)


def render_report(report: Any, format: ReportFormat = "table") -> str:
    """Render a report object, or a list of them, as JSON or an aligned table.

    Rates are shown in percent with an L/C/R classification letter.
    """
    items = list(report) if isinstance(report, (list, tuple)) else [report]
    if format == "json":
        payload = [_to_json(i) for i in items]
        if not isinstance(report, (list, tuple)):
            payload = payload[0]
        return json.dumps(payload, indent=2) + "\n"
    if format != "table":
        raise ValueError(f"unknown report format: {format!r}")
    if not items:
        return ""
    first = items[0]
    if isinstance(first, FitSummary):
        return _fit_table(items)
    if isinstance(first, GofResult):
        return _gof_table(items)
    if isinstance(first, SelectionReport):
        return "\n".join(_selection_table(i) for i in items)
    if isinstance(first, RateReport):
        return _rate_table(items)
    raise TypeError(f"cannot render {type(first).__name__}")
