"""AIC and model selection among candidates that pass the goodness-of-fit screen."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from paired_gof.bootstrap import BootstrapOptions, bootstrap_from_fit
from paired_gof.core.data import FrequencyTable
from paired_gof.errors import ConfigurationError, NumericalError
from paired_gof.estimation import FitOptions, FitResult, fit
from paired_gof.gof import ALL_METHODS, GofMethod, GofResult, asymptotic_from_fit
from paired_gof.gof.statistics import IndependenceK
from paired_gof.models import ModelKind

logger = logging.getLogger(__name__)

DEFAULT_CANDIDATES: tuple[ModelKind, ...] = (
    ModelKind.INDEPENDENCE,
    ModelKind.ROSNER,
    ModelKind.DONNER,
    ModelKind.DALLAL,
    ModelKind.CLAYTON,
)
_AIC_TIE = 1e-9


def free_parameters(model: ModelKind, table: FrequencyTable) -> int:
    """Parameter count used by AIC.

    Every non-saturated model is charged g + 1 parameters, which is the
    count under which the published AIC values for the independence model
    are reproduced. The saturated model is charged one parameter per free cell.
    """
    if model is ModelKind.SATURATED:
        return sum(2 * (grp.m_plus > 0) + (grp.n_plus > 0) for grp in table)
    return table.g + 1


def aic(result: FitResult, table: FrequencyTable, include_constant: bool = False) -> float:
    """2k - 2 loglik, optionally with the multinomial coefficients in the log-likelihood."""
    loglik = result.full_loglik if include_constant else result.loglik
    if not math.isfinite(loglik):
        raise NumericalError(f"{result.model.value}: log-likelihood is not finite")
    return 2.0 * free_parameters(result.model, table) - 2.0 * loglik


@dataclass(frozen=True)
class ModelAssessment:
    model: ModelKind
    k: int
    aic: float
    results: dict[GofMethod, GofResult] = field(default_factory=dict)
    passed: bool = False
    reasons: tuple[str, ...] = ()
    fit: FitResult | None = None

    @property
    def p_values(self) -> dict[GofMethod, float]:
        return {method: res.p_value for method, res in self.results.items()}


@dataclass(frozen=True)
class SelectionReport:
    assessments: tuple[ModelAssessment, ...]
    methods: tuple[GofMethod, ...]
    threshold: float
    best: ModelKind | None = None
    diagnostics: tuple[str, ...] = ()

    def assessment(self, model: ModelKind) -> ModelAssessment:
        for entry in self.assessments:
            if entry.model is model:
                return entry
        raise KeyError(model)


def assess_model(
    model: ModelKind,
    table: FrequencyTable,
    methods: Sequence[GofMethod],
    threshold: float,
    fit_opts: FitOptions | None = None,
    boot_opts: BootstrapOptions | None = None,
    independence_k: IndependenceK = "g",
) -> ModelAssessment:
    """Fit one candidate, run every requested test and decide whether it passes."""
    k = free_parameters(model, table)
    try:
        result = fit(model, table, fit_opts)
    except NumericalError as exc:
        logger.warning("%s: fit failed: %s", model.value, exc)
        return ModelAssessment(model=model, k=k, aic=math.nan, reasons=(f"fit failed: {exc}",))
    if not result.converged:
        return ModelAssessment(
            model=model, k=k, aic=math.nan, reasons=("fit did not converge",), fit=result
        )

    results: dict[GofMethod, GofResult] = {}
    reasons: list[str] = []
    for method in methods:
        if method.is_bootstrap:
            continue
        try:
            results[method] = asymptotic_from_fit(result, table, method, independence_k)
        except NumericalError as exc:
            reasons.append(f"{method.label}: {exc}")
    boot_methods = [m for m in methods if m.is_bootstrap]
    if boot_methods:
        if boot_opts is None:
            raise ConfigurationError("bootstrap methods require bootstrap options with a seed")
        try:
            results.update(bootstrap_from_fit(result, table, boot_methods, boot_opts, fit_opts))
        except NumericalError as exc:
            reasons.append(f"bootstrap: {exc}")

    for method in methods:
        res = results.get(method)
        if res is not None and not res.p_value > threshold:
            reasons.append(f"{method.label} p={res.p_value:.4f} <= {threshold:g}")
    ordered = {m: results[m] for m in methods if m in results}
    return ModelAssessment(
        model=model,
        k=k,
        aic=aic(result, table),
        results=ordered,
        passed=not reasons,
        reasons=tuple(reasons),
        fit=result,
    )


def select_model(
    table: FrequencyTable,
    candidates: Sequence[ModelKind] = DEFAULT_CANDIDATES,
    methods: Sequence[GofMethod] = ALL_METHODS,
    threshold: float = 0.05,
    fit_opts: FitOptions | None = None,
    boot_opts: BootstrapOptions | None = None,
    independence_k: IndependenceK = "g",
) -> SelectionReport:
    """Lowest-AIC candidate among those whose every requested p-value exceeds *threshold*.

    Ties in AIC go to the model with fewer parameters, then to the earlier
    candidate.
    """
    if not candidates:
        raise ConfigurationError("no candidate models")
    if not 0.0 < threshold < 1.0:
        raise ConfigurationError(f"threshold must lie in (0, 1), got {threshold}")

    assessments = tuple(
        assess_model(model, table, methods, threshold, fit_opts, boot_opts, independence_k)
        for model in candidates
    )
    passing = [a for a in assessments if a.passed and math.isfinite(a.aic)]
    diagnostics = [f"{a.model.value}: {'; '.join(a.reasons)}" for a in assessments if a.reasons]

    best = None
    if passing:
        lowest = min(a.aic for a in passing)
        tied = [a for a in passing if a.aic - lowest <= _AIC_TIE]
        best = min(tied, key=lambda a: a.k).model
        logger.info("Selected %s (AIC %.4f)", best.value, lowest)
    else:
        diagnostics.append("no candidate passed every requested test")
        logger.warning("No candidate model passed at threshold %g", threshold)

    return SelectionReport(
        assessments=assessments,
        methods=tuple(methods),
        threshold=threshold,
        best=best,
        diagnostics=tuple(diagnostics),
    )
