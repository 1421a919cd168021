"""Log-likelihood, scores and curvature for every model, keyed by ModelKind."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import gammaln, xlogy

from paired_gof.core.data import FrequencyTable, GroupCounts
from paired_gof.errors import DomainError, SingularPointError
from paired_gof.models.base import (
    PROB_TOL,
    CorrelationModel,
    JointProbs,
    ModelKind,
    NuisanceInterval,
    ParamVector,
)
from paired_gof.models.clayton import ClaytonModel
from paired_gof.models.dallal import DallalModel
from paired_gof.models.donner import DonnerModel
from paired_gof.models.independence import IndependenceModel
from paired_gof.models.rosner import RosnerModel

_REGISTRY: dict[ModelKind, CorrelationModel] = {
    ModelKind.INDEPENDENCE: IndependenceModel(),
    ModelKind.ROSNER: RosnerModel(),
    ModelKind.DONNER: DonnerModel(),
    ModelKind.DALLAL: DallalModel(),
    ModelKind.CLAYTON: ClaytonModel(),
}


def get_model(kind: ModelKind) -> CorrelationModel:
    try:
        return _REGISTRY[kind]
    except KeyError:
        raise DomainError(f"{kind.value} has no parametric joint probabilities") from None


def count_arrays(table: FrequencyTable) -> tuple[np.ndarray, np.ndarray]:
    """Bilateral counts as a (g, 3) array and unilateral counts as (g, 2)."""
    m = np.array([grp.bilateral for grp in table.groups], dtype=float).reshape(-1, 3)
    n = np.array([grp.unilateral for grp in table.groups], dtype=float).reshape(-1, 2)
    return m, n


# ── Pointwise quantities ──────────────────────────────────────────


def nuisance_domain(model: ModelKind, pis: Sequence[float]) -> NuisanceInterval:
    """Admissible nuisance interval given the marginal probabilities."""
    if not model.has_nuisance:
        raise DomainError(f"{model.value}: no nuisance parameter")
    if not pis or any(not 0.0 < p < 1.0 for p in pis):
        raise DomainError("marginal probabilities must lie strictly inside (0, 1)")
    return get_model(model).domain(pis)


def _check_kappa(model: ModelKind, pis: Sequence[float], kappa: float | None) -> None:
    if not model.has_nuisance:
        return
    if kappa is None or not math.isfinite(kappa):
        raise DomainError(f"{model.value}: nuisance value required")
    interval = nuisance_domain(model, pis)
    if not interval.contains(kappa):
        raise DomainError(f"{model.value}: {kappa!r} outside {interval}")


def joint_probs(model: ModelKind, pi: float, kappa: float | None = None) -> JointProbs:
    _check_kappa(model, [pi], kappa)
    p = get_model(model).probs(np.asarray(pi, dtype=float), kappa)
    if np.any(p < -PROB_TOL) or np.any(p > 1.0 + PROB_TOL):
        raise DomainError(f"{model.value}: joint probabilities {p.tolist()} out of range")
    p0, p1, p2 = (float(v) for v in np.clip(p, 0.0, 1.0))
    return JointProbs(p0, p1, p2)


def correlation(model: ModelKind, pi: float, kappa: float | None = None) -> float:
    """Intra-subject correlation implied by the model at (pi, kappa)."""
    _check_kappa(model, [pi], kappa)
    return float(get_model(model).correlation(np.asarray(pi, dtype=float), kappa))


# ── Likelihood ────────────────────────────────────────────────────


def bilateral_probs(model: ModelKind, params: ParamVector) -> np.ndarray:
    """Joint probabilities for every group as a (g, 3) array."""
    if model is ModelKind.SATURATED:
        rows = [(math.nan,) * 3 if jp is None else jp.as_tuple() for jp in params.joint or ()]
        return np.array(rows, dtype=float).reshape(-1, 3)
    p = get_model(model).probs(params.pi_array(), params.kappa)
    return np.clip(p.T, 0.0, 1.0)


def log_likelihood(model: ModelKind, params: ParamVector, table: FrequencyTable) -> float:
    """Log-likelihood without the multinomial coefficients; 0 log 0 is 0."""
    m, n = count_arrays(table)
    pis = params.pi_array()
    p = bilateral_probs(model, params)
    if model is ModelKind.SATURATED:
        # groups lacking one part contribute nothing for it
        p = np.where(np.isnan(p), 1.0, p)
        pis = np.where(np.isnan(pis), 0.5, pis)
    return _loglik(m, n, p, pis)


def loglik_from_counts(
    model: ModelKind, pis: np.ndarray, kappa: float | None, m: np.ndarray, n: np.ndarray
) -> float:
    """Same as :func:`log_likelihood` for a parametric model on pre-built count arrays."""
    p = np.clip(get_model(model).probs(pis, kappa).T, 0.0, 1.0)
    return _loglik(m, n, p, pis)


def _loglik(m: np.ndarray, n: np.ndarray, p: np.ndarray, pis: np.ndarray) -> float:
    total = xlogy(m, p).sum() + xlogy(n[:, 0], 1.0 - pis).sum() + xlogy(n[:, 1], pis).sum()
    return float(total)


def group_log_likelihood(model: ModelKind, pi: float, kappa: float | None, group: GroupCounts) -> float:
    p = np.clip(get_model(model).probs(np.asarray(pi, dtype=float), kappa), 0.0, 1.0)
    value = xlogy(np.array(group.bilateral, dtype=float), p).sum()
    value += xlogy(group.n0, 1.0 - pi) + xlogy(group.n1, pi)
    return float(value)


def log_multinomial_constant(table: FrequencyTable) -> float:
    """Sum of the log multinomial and binomial coefficients of the table."""
    m, n = count_arrays(table)
    value = gammaln(m.sum(axis=1) + 1).sum() - gammaln(m + 1).sum()
    value += gammaln(n.sum(axis=1) + 1).sum() - gammaln(n + 1).sum()
    return float(value)


# ── Derivatives ───────────────────────────────────────────────────


def _ratio(counts: np.ndarray, num: np.ndarray, p: np.ndarray) -> np.ndarray:
    """counts * num / p with a SingularPointError where a used cell has p = 0."""
    used = counts > 0
    if np.any(used & (p <= 0.0)):
        raise SingularPointError("derivative evaluated where a cell probability is zero")
    safe = np.where(used, p, 1.0)
    return np.where(used, counts * num / safe, 0.0)


def _parametric(model: ModelKind, params: ParamVector) -> CorrelationModel:
    if model is ModelKind.SATURATED:
        raise DomainError("saturated model has no score equations")
    return get_model(model)


def score_pi(model: ModelKind, params: ParamVector, table: FrequencyTable, i: int) -> float:
    """Derivative of the log-likelihood with respect to the i-th marginal probability."""
    impl = _parametric(model, params)
    pi = params.pis[i]
    grp = table[i]
    if (grp.n1 > 0 and pi <= 0.0) or (grp.n0 > 0 and pi >= 1.0):
        raise SingularPointError(f"unilateral term singular at pi={pi!r}")
    p = impl.probs(np.asarray(pi, dtype=float), params.kappa)
    dp = impl.dprobs_dpi(np.asarray(pi, dtype=float), params.kappa)
    value = _ratio(np.array(grp.bilateral, dtype=float), dp, p).sum()
    if grp.n1:
        value += grp.n1 / pi
    if grp.n0:
        value -= grp.n0 / (1.0 - pi)
    return float(value)


def score_kappa(model: ModelKind, params: ParamVector, table: FrequencyTable) -> float:
    """Derivative of the log-likelihood with respect to the nuisance parameter."""
    _parametric(model, params)
    m, _ = count_arrays(table)
    return kappa_derivatives(model, params.pi_array(), params.kappa, m)[0]


def d2_kappa(model: ModelKind, params: ParamVector, table: FrequencyTable) -> float:
    """Second derivative of the log-likelihood in the nuisance parameter."""
    _parametric(model, params)
    m, _ = count_arrays(table)
    return kappa_derivatives(model, params.pi_array(), params.kappa, m)[1]


def kappa_derivatives(
    model: ModelKind, pis: np.ndarray, kappa: float, m: np.ndarray
) -> tuple[float, float]:
    """(score, second derivative) in the nuisance parameter from bilateral counts."""
    impl = get_model(model)
    p = impl.probs(pis, kappa).T
    dk = impl.dprobs_dkappa(pis, kappa).T
    d2k = impl.d2probs_dkappa2(pis, kappa).T
    first = _ratio(m, dk, p)
    safe = np.where(m > 0, p, 1.0)
    second = _ratio(m, d2k, p) - np.where(m > 0, first * dk / safe, 0.0)
    return float(first.sum()), float(second.sum())
