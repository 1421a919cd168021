"""Expected counts, deviance and Pearson statistics, and chi-square p-values."""
from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
from scipy.special import gammaincc

from paired_gof.core.data import FrequencyTable
from paired_gof.errors import ConvergenceError, DegreesOfFreedomError
from paired_gof.estimation import FitOptions, FitResult, fit
from paired_gof.gof.types import ASYMPTOTIC_METHODS, GofMethod, GofResult
from paired_gof.models import (
    ModelKind,
    bilateral_probs,
    count_arrays,
    log_likelihood,
    log_multinomial_constant,
)

logger = logging.getLogger(__name__)

IndependenceK = Literal["g", "g+1"]


def expected_counts(fit: FitResult, table: FrequencyTable) -> np.ndarray:
    """Expected cell counts as a (g, 5) array ordered (m0, m1, m2, n0, n1)."""
    m, n = count_arrays(table)
    m_plus = m.sum(axis=1, keepdims=True)
    n_plus = n.sum(axis=1)
    p = np.nan_to_num(bilateral_probs(fit.model, fit.params), nan=0.0)
    pis = np.nan_to_num(fit.params.pi_array(), nan=0.0)
    unilateral = np.column_stack((n_plus * (1.0 - pis), n_plus * pis))
    return np.hstack((m_plus * p, unilateral))


def observed_counts(table: FrequencyTable) -> np.ndarray:
    m, n = count_arrays(table)
    return np.hstack((m, n))


def gof_statistic(method: GofMethod, observed: FrequencyTable, expected: np.ndarray) -> float:
    """G2, X2 or X2adj summed over every cell of every group.

    Cells with zero observed and zero expected count are skipped; a
    positive observation with zero expectation makes the statistic infinite.
    """
    obs = observed_counts(observed).ravel()
    exp = np.asarray(expected, dtype=float).ravel()
    keep = (obs > 0) | (exp > 0)
    obs, exp = obs[keep], exp[keep]
    if np.any((exp <= 0) & (obs > 0)):
        return math.inf

    if method is GofMethod.G2:
        pos = obs > 0
        return float(2.0 * np.sum(obs[pos] * np.log(obs[pos] / exp[pos])))
    if method is GofMethod.X2:
        return float(np.sum((obs - exp) ** 2 / exp))
    if method is GofMethod.X2ADJ:
        return float(np.sum((np.abs(obs - exp) - 0.5) ** 2 / exp))
    raise ValueError(f"{method.label} is not an asymptotic statistic")


def degrees_of_freedom(
    model: ModelKind, table: FrequencyTable, independence_k: IndependenceK = "g"
) -> int:
    """Free cells minus fitted parameters.

    Each group contributes two free cells for its bilateral part and one
    for its unilateral part. Independence fits g parameters; passing
    ``independence_k="g+1"`` counts one more, as for the nuisance models.
    """
    if model is ModelKind.SATURATED:
        raise DegreesOfFreedomError("saturated model has no asymptotic test")
    free = sum(2 * (grp.m_plus > 0) + (grp.n_plus > 0) for grp in table)
    k = table.g + 1
    if model is ModelKind.INDEPENDENCE and independence_k == "g":
        k = table.g
    dof = free - k
    if dof < 1:
        raise DegreesOfFreedomError(
            f"{model.value}: saturated or over-parameterized ({free} free cells, {k} parameters); "
            "asymptotic test undefined"
        )
    return dof


def chi_square_sf(x: float, dof: int) -> float:
    """Upper tail of the chi-square distribution."""
    if math.isinf(x):
        return 0.0
    return float(gammaincc(dof / 2.0, max(x, 0.0) / 2.0))


def log_observed_table_probability(fit: FitResult, table: FrequencyTable) -> float:
    return log_likelihood(fit.model, fit.params, table) + log_multinomial_constant(table)


def observed_table_probability(fit: FitResult, table: FrequencyTable) -> float:
    """Probability of the table's exact counts under the fitted parameters."""
    return math.exp(log_observed_table_probability(fit, table))


def asymptotic_from_fit(
    result: FitResult,
    table: FrequencyTable,
    method: GofMethod,
    independence_k: IndependenceK = "g",
) -> GofResult:
    if method not in ASYMPTOTIC_METHODS:
        raise ValueError(f"{method.label} is not an asymptotic method")
    stat = gof_statistic(method, table, expected_counts(result, table))
    dof = degrees_of_freedom(result.model, table, independence_k)
    return GofResult(
        model=result.model,
        method=method,
        statistic=stat,
        p_value=chi_square_sf(stat, dof),
        dof=dof,
        boundary=result.boundary,
    )


def asymptotic_gof(
    model: ModelKind,
    table: FrequencyTable,
    method: GofMethod,
    opts: FitOptions | None = None,
    independence_k: IndependenceK = "g",
) -> GofResult:
    """Fit *model* and test it against the saturated model."""
    result = fit(model, table, opts)
    if not result.converged:
        raise ConvergenceError(f"{model.value}: fit did not converge after {result.iterations} iterations")
    if result.boundary:
        logger.info("%s: boundary estimate, chi-square reference is approximate", model.value)
    return asymptotic_from_fit(result, table, method, independence_k)
