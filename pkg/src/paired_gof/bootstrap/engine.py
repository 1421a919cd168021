"""Parametric bootstrap goodness-of-fit tests.

Every replicate is drawn from the model fitted to the observed table, the
model is refitted to the replicate, and the replicate is ranked against the
observed table by its deviance (B1), its Pearson statistic (B2) or its own
probability under its refit (B3).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Iterable, NamedTuple

import numpy as np

from paired_gof.bootstrap.rng import RandomSource
from paired_gof.core.data import FrequencyTable, GroupCounts
from paired_gof.errors import BootstrapError, ConfigurationError, ConvergenceError, DomainError, NumericalError
from paired_gof.estimation import FitOptions, FitResult, fit
from paired_gof.gof import (
    BOOTSTRAP_METHODS,
    GofMethod,
    GofResult,
    expected_counts,
    gof_statistic,
    log_observed_table_probability,
)
from paired_gof.models import ModelKind, ParamVector, bilateral_probs

logger = logging.getLogger(__name__)

_TIE_RTOL = 1e-9
_TIE_ATOL = 1e-10


@dataclass(frozen=True)
class BootstrapOptions:
    n_boot: int = 2000
    seed: int | None = None
    max_regen: int = 100
    threads: int = 1
    # worker processes instead of threads when threads > 1
    processes: bool = False

    def __post_init__(self) -> None:
        if self.n_boot < 1:
            raise ConfigurationError(f"n_boot must be >= 1, got {self.n_boot}")
        if self.max_regen < 0:
            raise ConfigurationError(f"max_regen must be >= 0, got {self.max_regen}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")


class ReplicateStats(NamedTuple):
    g2: float
    x2: float
    log_prob: float


# ── Sampling ──────────────────────────────────────────────────────


def sample_from_probs(
    probs: np.ndarray, pis: np.ndarray, shape: FrequencyTable, rng: RandomSource
) -> FrequencyTable:
    """Draw a table with the margins of *shape* from per-group probabilities.

    *probs* is a (g, 3) array of bilateral joint probabilities and *pis*
    the per-group marginal response probabilities.
    """
    gen = rng.generator
    m_plus = np.array([grp.m_plus for grp in shape], dtype=np.int64)
    n_plus = np.array([grp.n_plus for grp in shape], dtype=np.int64)

    p = np.nan_to_num(np.asarray(probs, dtype=float), nan=0.0).clip(0.0, 1.0)
    totals = p.sum(axis=1, keepdims=True)
    p = np.where(totals > 0, p / np.where(totals > 0, totals, 1.0), np.array([1.0, 0.0, 0.0]))
    bilateral = gen.multinomial(m_plus, p)

    q = np.nan_to_num(np.asarray(pis, dtype=float), nan=0.0).clip(0.0, 1.0)
    n1 = gen.binomial(n_plus, q)

    groups = tuple(
        GroupCounts(
            int(b[0]), int(b[1]), int(b[2]), int(n - k), int(k), label=grp.label
        )
        for b, n, k, grp in zip(bilateral, n_plus, n1, shape)
    )
    return FrequencyTable(groups=groups)


def sample_table(
    params: ParamVector, model: ModelKind, shape: FrequencyTable, rng: RandomSource
) -> FrequencyTable:
    """Draw a table under *model* at *params*, keeping the margins of *shape*."""
    return sample_from_probs(bilateral_probs(model, params), params.pi_array(), shape, rng)


# ── Bootstrap tests ───────────────────────────────────────────────


def _table_stats(result: FitResult, table: FrequencyTable) -> ReplicateStats:
    expected = expected_counts(result, table)
    return ReplicateStats(
        g2=gof_statistic(GofMethod.G2, table, expected),
        x2=gof_statistic(GofMethod.X2, table, expected),
        log_prob=log_observed_table_probability(result, table),
    )


def _warm_options(observed_fit: FitResult, fit_opts: FitOptions | None) -> FitOptions | None:
    """Start replicate refits from the observed-data estimates."""
    if not observed_fit.model.has_nuisance or observed_fit.params.kappa is None:
        return fit_opts
    return replace(
        fit_opts or FitOptions(),
        kappa_init=observed_fit.params.kappa,
        pi_init=tuple(float(p) for p in observed_fit.params.pis),
    )


def _refit(model: ModelKind, replicate: FrequencyTable, warm: FitOptions | None, cold: FitOptions | None) -> FitResult:
    try:
        return fit(model, replicate, warm)
    except DomainError:
        return fit(model, replicate, cold)


def _run_replicate(
    index: int,
    observed_fit: FitResult,
    shape: FrequencyTable,
    root: RandomSource,
    boot_opts: BootstrapOptions,
    fit_opts: FitOptions | None,
) -> ReplicateStats | None:
    warm = _warm_options(observed_fit, fit_opts)
    for attempt in range(boot_opts.max_regen + 1):
        replicate = sample_table(observed_fit.params, observed_fit.model, shape, root.stream(index, attempt))
        try:
            refit = _refit(observed_fit.model, replicate, warm, fit_opts)
        except NumericalError as exc:
            logger.debug("Replicate %d attempt %d refit failed: %s", index, attempt, exc)
            continue
        if not refit.converged:
            logger.debug("Replicate %d attempt %d did not converge", index, attempt)
            continue
        if attempt:
            logger.debug("Replicate %d regenerated %d times", index, attempt)
        return _table_stats(refit, replicate)
    logger.warning("Replicate %d failed after %d regenerations", index, boot_opts.max_regen)
    return None


def _count(method: GofMethod, observed: ReplicateStats, replicates: list[ReplicateStats]) -> tuple[int, int]:
    """(more extreme, tied) replicate counts.

    Values within rounding of the observed statistic count as ties, never as
    more extreme.
    """
    if method is GofMethod.B1:
        values, ref, larger_is_extreme = [r.g2 for r in replicates], observed.g2, True
    elif method is GofMethod.B2:
        values, ref, larger_is_extreme = [r.x2 for r in replicates], observed.x2, True
    else:
        values, ref, larger_is_extreme = [r.log_prob for r in replicates], observed.log_prob, False
    arr = np.asarray(values, dtype=float)
    # refits of a table identical to the observed one agree only to rounding
    tied = np.isclose(arr, ref, rtol=_TIE_RTOL, atol=_TIE_ATOL)
    extreme = (arr > ref if larger_is_extreme else arr < ref) & ~tied
    return int(np.count_nonzero(extreme)), int(np.count_nonzero(tied))


def bootstrap_from_fit(
    observed_fit: FitResult,
    table: FrequencyTable,
    methods: Iterable[GofMethod],
    boot_opts: BootstrapOptions,
    fit_opts: FitOptions | None = None,
    rng: RandomSource | None = None,
) -> dict[GofMethod, GofResult]:
    """Run one set of replicates and score it for each requested bootstrap method.

    Replicate streams derive from *rng* when given, otherwise from the seed
    in *boot_opts*.
    """
    methods = [m for m in methods if m.is_bootstrap]
    if not methods:
        return {}
    if rng is None:
        if boot_opts.seed is None:
            raise ConfigurationError("bootstrap methods require a seed")
        rng = RandomSource(boot_opts.seed)
    if observed_fit.model is ModelKind.SATURATED:
        raise ConfigurationError("the saturated model cannot be tested against itself")

    observed = _table_stats(observed_fit, table)

    run = partial(
        _run_replicate, observed_fit=observed_fit, shape=table, root=rng, boot_opts=boot_opts, fit_opts=fit_opts
    )
    indices = range(boot_opts.n_boot)
    if boot_opts.threads > 1 and boot_opts.processes:
        chunk = max(1, boot_opts.n_boot // (4 * boot_opts.threads))
        with ProcessPoolExecutor(max_workers=boot_opts.threads) as pool:
            outcomes = list(pool.map(run, indices, chunksize=chunk))
    elif boot_opts.threads > 1:
        with ThreadPoolExecutor(max_workers=boot_opts.threads) as pool:
            outcomes = list(pool.map(run, indices))
    else:
        outcomes = [run(i) for i in indices]

    replicates = [r for r in outcomes if r is not None]
    failed = len(outcomes) - len(replicates)
    if failed:
        logger.warning(
            "%s: %d of %d bootstrap replicates failed and were excluded",
            observed_fit.model.value,
            failed,
            boot_opts.n_boot,
        )
    if not replicates:
        raise BootstrapError(f"{observed_fit.model.value}: every bootstrap replicate failed")

    results: dict[GofMethod, GofResult] = {}
    for method in methods:
        n_extreme, n_ties = _count(method, observed, replicates)
        statistic = {
            GofMethod.B1: observed.g2,
            GofMethod.B2: observed.x2,
            GofMethod.B3: math.exp(observed.log_prob),
        }[method]
        results[method] = GofResult(
            model=observed_fit.model,
            method=method,
            statistic=statistic,
            p_value=n_extreme / len(replicates),
            n_boot=len(replicates),
            n_extreme=n_extreme,
            n_ties=n_ties,
            failed_replicates=failed,
            boundary=observed_fit.boundary,
        )
    return results


def bootstrap_gof(
    model: ModelKind,
    table: FrequencyTable,
    method: GofMethod,
    boot_opts: BootstrapOptions,
    fit_opts: FitOptions | None = None,
) -> GofResult:
    """Parametric bootstrap p-value of *model* on *table* for one of B1, B2, B3."""
    if method not in BOOTSTRAP_METHODS:
        raise ValueError(f"{method.label} is not a bootstrap method")
    observed_fit = fit(model, table, fit_opts)
    if not observed_fit.converged:
        raise ConvergenceError(f"{model.value}: observed fit did not converge")
    return bootstrap_from_fit(observed_fit, table, [method], boot_opts, fit_opts)[method]


def bootstrap_rejects(result: GofResult, alpha: float = 0.05) -> bool:
    """Reject when fewer than alpha * n_boot replicates are more extreme."""
    if result.n_extreme is None or result.n_boot is None:
        raise ValueError(f"{result.method.label} is not a bootstrap result")
    return result.n_extreme < alpha * result.n_boot
