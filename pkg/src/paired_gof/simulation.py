"""Monte Carlo type I error and power studies.

A scenario fixes a generating model, per-group marginal probabilities,
a nuisance value (one for all groups, or one per group for the
alternative-hypothesis setups) and the per-group sample sizes. Each
replicate draws a table, fits the tested model and records which
methods reject at level alpha.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from pydantic import ValidationError

from paired_gof.bootstrap import BootstrapOptions, RandomSource, bootstrap_from_fit, bootstrap_rejects
from paired_gof.bootstrap.engine import sample_from_probs
from paired_gof.core.data import FrequencyTable, GroupCounts
from paired_gof.core.schema import ScenarioFile
from paired_gof.errors import ConfigurationError, DomainError, NumericalError, ParseError
from paired_gof.estimation import FitOptions, fit
from paired_gof.gof import ASYMPTOTIC_METHODS, GofMethod, asymptotic_from_fit, degrees_of_freedom
from paired_gof.models import ModelKind, joint_probs

logger = logging.getLogger(__name__)

Classification = Literal["liberal", "conservative", "robust"]

NULL_PI_CASES: dict[str, tuple[float, ...]] = {
    "I": (0.3, 0.5),
    "II": (0.5, 0.5),
    "III": (0.1, 0.2, 0.3, 0.4),
    "IV": (0.2, 0.2, 0.4, 0.4),
    "V": (0.1, 0.2, 0.3, 0.4) * 2,
    "VI": (0.2, 0.2, 0.4, 0.4) * 2,
}

ALTERNATIVE_PI_CASES: dict[str, tuple[float, ...]] = {
    **NULL_PI_CASES,
    "I": (0.2, 0.2),
    "II": (0.2, 0.4),
}

NULL_KAPPAS: dict[ModelKind, tuple[float, ...]] = {
    ModelKind.ROSNER: (1.2, 1.5, 1.8),
    ModelKind.DONNER: (0.5, 0.7, 0.9),
    ModelKind.DALLAL: (0.3, 0.5, 0.7),
    ModelKind.CLAYTON: (1.0, 2.0, 4.0),
}

# Alternative setups: the first half of the groups takes the first value.
ALTERNATIVE_KAPPAS: dict[ModelKind, tuple[float, float]] = {
    ModelKind.ROSNER: (1.2, 1.5),
    ModelKind.DONNER: (0.5, 0.7),
    ModelKind.DALLAL: (0.5, 0.7),
    ModelKind.CLAYTON: (2.0, 4.0),
}

NULL_SIZES = (25, 50, 100)
ALTERNATIVE_SIZE = 150


@dataclass(frozen=True)
class ScenarioConfig:
    model: ModelKind
    pis: tuple[float, ...]
    kappa: float | tuple[float, ...] | None
    m_plus: int
    n_plus: int
    alpha: float = 0.05
    n_rep: int = 10_000
    boot: BootstrapOptions = field(default_factory=BootstrapOptions)
    methods: tuple[GofMethod, ...] = ASYMPTOTIC_METHODS
    fitted_model: ModelKind | None = None
    name: str = ""

    @property
    def g(self) -> int:
        return len(self.pis)

    @property
    def fitted(self) -> ModelKind:
        return self.fitted_model or self.model

    @property
    def kappas(self) -> tuple[float | None, ...]:
        if isinstance(self.kappa, tuple):
            return self.kappa
        return (self.kappa,) * self.g

    @property
    def is_alternative(self) -> bool:
        return isinstance(self.kappa, tuple) and len(set(self.kappa)) > 1

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        kappa = ",".join(f"{k:g}" for k in self.kappas if k is not None) if self.is_alternative else self.kappa
        return f"{self.model.value} g={self.g} kappa={kappa} size={self.m_plus}/{self.n_plus}"

    def validate(self) -> None:
        if self.g < 1:
            raise ConfigurationError("scenario needs at least one group")
        if isinstance(self.kappa, tuple) and len(self.kappa) != self.g:
            raise ConfigurationError(f"{len(self.kappa)} nuisance values for {self.g} groups")
        if self.m_plus < 0 or self.n_plus < 0 or self.m_plus + self.n_plus == 0:
            raise ConfigurationError("per-group sample sizes must be non-negative and not both zero")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n_rep < 1:
            raise ConfigurationError("n_rep must be >= 1")
        if self.model is ModelKind.SATURATED or self.fitted is ModelKind.SATURATED:
            raise ConfigurationError("the saturated model cannot drive a scenario")
        for pi, kappa in zip(self.pis, self.kappas):
            try:
                joint_probs(self.model, pi, kappa)
            except DomainError as exc:
                raise ConfigurationError(f"inadmissible scenario ({self.label}): {exc}") from exc


@dataclass(frozen=True)
class MethodRate:
    method: GofMethod
    rejections: int
    n: int
    rate: float
    se: float
    classification: Classification


@dataclass(frozen=True)
class RateReport:
    """Rejection rates of one scenario: type I errors under a null setup, powers otherwise."""

    scenario: ScenarioConfig
    rates: tuple[MethodRate, ...]
    n_rep: int
    failed: int = 0

    def rate(self, method: GofMethod) -> float:
        for entry in self.rates:
            if entry.method is method:
                return entry.rate
        raise KeyError(method)


def classify_rate(rate: float, alpha: float) -> Classification:
    """Liberal above 1.2 alpha, conservative below 0.8 alpha, robust in between (inclusive)."""
    ratio = rate / alpha
    if ratio > 1.2 + 1e-12:
        return "liberal"
    if ratio < 0.8 - 1e-12:
        return "conservative"
    return "robust"


def _shape(config: ScenarioConfig) -> FrequencyTable:
    return FrequencyTable(
        groups=tuple(
            GroupCounts(config.m_plus, 0, 0, config.n_plus, 0, label=str(i + 1)) for i in range(config.g)
        )
    )


def _replicate(
    index: int,
    config: ScenarioConfig,
    probs: np.ndarray,
    pis: np.ndarray,
    shape: FrequencyTable,
    root: RandomSource,
    fit_opts: FitOptions | None,
) -> dict[GofMethod, bool] | None:
    table = sample_from_probs(probs, pis, shape, root.stream(index, 0))
    try:
        result = fit(config.fitted, table, fit_opts)
    except NumericalError as exc:
        logger.debug("Scenario replicate %d: fit failed (%s)", index, exc)
        return None
    if not result.converged:
        return None

    rejected: dict[GofMethod, bool] = {}
    for method in config.methods:
        if not method.is_bootstrap:
            rejected[method] = asymptotic_from_fit(result, table, method).p_value < config.alpha
    boot_methods = [m for m in config.methods if m.is_bootstrap]
    if boot_methods:
        boot = bootstrap_from_fit(result, table, boot_methods, config.boot, fit_opts, rng=root.stream(index, 1))
        for method, res in boot.items():
            rejected[method] = bootstrap_rejects(res, config.alpha)
    return rejected


def run_scenario(
    config: ScenarioConfig,
    seed: int | RandomSource,
    fit_opts: FitOptions | None = None,
    threads: int = 1,
) -> RateReport:
    """Empirical rejection rate of each requested method over ``n_rep`` tables."""
    config.validate()
    root = seed if isinstance(seed, RandomSource) else RandomSource(seed)
    shape = _shape(config)
    if any(not m.is_bootstrap for m in config.methods):
        degrees_of_freedom(config.fitted, shape)

    rows = [joint_probs(config.model, pi, kappa).as_tuple() for pi, kappa in zip(config.pis, config.kappas)]
    probs = np.array(rows, dtype=float)
    pis = np.array(config.pis, dtype=float)
    logger.info("Scenario %s: %d replicates", config.label, config.n_rep)

    def run(index: int) -> dict[GofMethod, bool] | None:
        outcome = _replicate(index, config, probs, pis, shape, root, fit_opts)
        if (index + 1) % 1000 == 0:
            logger.info("Scenario %s: %d/%d replicates", config.label, index + 1, config.n_rep)
        return outcome

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, range(config.n_rep)))
    else:
        outcomes = [run(i) for i in range(config.n_rep)]

    done = [o for o in outcomes if o is not None]
    failed = len(outcomes) - len(done)
    if failed:
        logger.warning("Scenario %s: %d replicates excluded after failed fits", config.label, failed)
    if not done:
        raise NumericalError(f"scenario {config.label}: every replicate failed")

    rates = []
    for method in config.methods:
        rejections = sum(o[method] for o in done)
        rate = rejections / len(done)
        rates.append(
            MethodRate(
                method=method,
                rejections=rejections,
                n=len(done),
                rate=rate,
                se=math.sqrt(rate * (1.0 - rate) / len(done)),
                classification=classify_rate(rate, config.alpha),
            )
        )
    return RateReport(scenario=config, rates=tuple(rates), n_rep=len(done), failed=failed)


def run_grid(
    configs: Sequence[ScenarioConfig],
    seed: int,
    fit_opts: FitOptions | None = None,
    threads: int = 1,
) -> list[RateReport]:
    """Run every scenario on its own stream derived from *seed* and its position."""
    root = RandomSource(seed)
    return [run_scenario(cfg, root.stream(i), fit_opts, threads) for i, cfg in enumerate(configs)]


# ── Published setups ──────────────────────────────────────────────


def null_grid(
    model: ModelKind,
    sizes: Sequence[int] = NULL_SIZES,
    cases: Sequence[str] | None = None,
    kappas: Sequence[float] | None = None,
    **overrides,
) -> list[ScenarioConfig]:
    """Type I error scenarios: every size x pi case x nuisance value."""
    if model not in NULL_KAPPAS:
        raise ConfigurationError(f"no null setups for {model.value}")
    configs = []
    for size in sizes:
        for case in cases or NULL_PI_CASES:
            pis = NULL_PI_CASES[case]
            for kappa in kappas or NULL_KAPPAS[model]:
                configs.append(
                    ScenarioConfig(
                        model=model,
                        pis=pis,
                        kappa=kappa,
                        m_plus=size,
                        n_plus=size,
                        name=f"{model.value} size={size} g={len(pis)} case={case} kappa={kappa:g}",
                        **overrides,
                    )
                )
    return configs


def alternative_grid(
    model: ModelKind,
    size: int = ALTERNATIVE_SIZE,
    cases: Sequence[str] | None = None,
    **overrides,
) -> list[ScenarioConfig]:
    """Power scenarios: the first half of the groups uses the first nuisance value."""
    if model not in ALTERNATIVE_KAPPAS:
        raise ConfigurationError(f"no alternative setups for {model.value}")
    first, second = ALTERNATIVE_KAPPAS[model]
    configs = []
    for case in cases or ALTERNATIVE_PI_CASES:
        pis = ALTERNATIVE_PI_CASES[case]
        half = len(pis) // 2
        kappa = (first,) * half + (second,) * (len(pis) - half)
        configs.append(
            ScenarioConfig(
                model=model,
                pis=pis,
                kappa=kappa,
                m_plus=size,
                n_plus=size,
                name=f"{model.value} size={size} g={len(pis)} case={case} kappa={first:g}/{second:g}",
                **overrides,
            )
        )
    return configs


def load_scenarios(text: str) -> tuple[int | None, list[ScenarioConfig]]:
    """Parse a scenario-grid JSON document into (seed, configs)."""
    try:
        doc = ScenarioFile.model_validate(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    except ValidationError as exc:
        raise ParseError(str(exc.errors()[0]["msg"])) from exc

    configs = []
    for entry in doc.scenarios:
        try:
            model = ModelKind.parse(entry.model)
            fitted = ModelKind.parse(entry.fitted_model) if entry.fitted_model else None
            methods = tuple(GofMethod.parse_list(",".join(entry.methods)))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc
        kappa = tuple(entry.kappa) if isinstance(entry.kappa, list) else entry.kappa
        config = ScenarioConfig(
            model=model,
            pis=tuple(entry.pis),
            kappa=kappa,
            m_plus=entry.m_plus,
            n_plus=entry.n_plus,
            alpha=entry.alpha,
            n_rep=entry.n_rep,
            boot=BootstrapOptions(n_boot=entry.bootstrap.n_boot, max_regen=entry.bootstrap.max_regen),
            methods=methods,
            fitted_model=fitted,
            name=entry.name or "",
        )
        config.validate()
        configs.append(config)
    return doc.seed, configs
