"""Maximum-likelihood fitting for every model.

The parametric models are fitted by alternating two steps until the
nuisance estimate settles:

1. given kappa, solve each group's normal equation for its marginal
   probability (a polynomial for Rosner, Donner and Dallal, a bracketed
   numeric root for the Clayton copula);
2. given the marginal probabilities, take one damped Newton step in kappa.

Independence and Saturated have closed forms.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import xlogy

from paired_gof.core.data import FrequencyTable, GroupCounts
from paired_gof.errors import (
    ConfigurationError,
    DataValidationError,
    DomainError,
    NoAdmissibleRootError,
    NumericalError,
    SingularHessianError,
    UnidentifiableError,
)
from paired_gof.estimation.roots import EPS, bracketed_roots, unit_interval_roots
from paired_gof.models import (
    JointProbs,
    ModelKind,
    ParamVector,
    count_arrays,
    get_model,
    group_log_likelihood,
    kappa_derivatives,
    log_likelihood,
    log_multinomial_constant,
    loglik_from_counts,
)
from paired_gof.models.base import PROB_TOL, NuisanceInterval
from paired_gof.models.independence import IndependenceModel

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30
BOUNDARY_MARGIN = 1e-9
_TIE_TOL = 1e-12
_PI_FLOOR = 1e-9
_EDGE_TOL = 1e-7
# Alternation step size below which the profile secant takes over.
_SECANT_SWITCH = 1e-3
_POLISH_STEPS = 8
_CLAYTON_GRID = 97


@dataclass(frozen=True)
class FitOptions:
    tol: float = 1e-6
    max_iter: int = 500
    kappa_init: float | None = None
    pi_init: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ConfigurationError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood estimates and iteration diagnostics."""

    model: ModelKind
    params: ParamVector
    loglik: float
    loglik_const: float
    iterations: int
    converged: bool
    boundary: bool = False

    @property
    def g(self) -> int:
        return self.params.g

    @property
    def full_loglik(self) -> float:
        """Log-likelihood including the multinomial coefficients."""
        return self.loglik + self.loglik_const


class KappaUpdate(NamedTuple):
    kappa: float
    boundary: bool
    halvings: int


class ProfilePolish(NamedTuple):
    kappa: float
    settled: bool


# ── Step 1: marginal probabilities ────────────────────────────────


def solve_pi_given_kappa(model: ModelKind, kappa: float | None, group: GroupCounts) -> float:
    """Root of one group's normal equation in pi for a fixed nuisance value.

    Among the admissible roots, the one with the largest group
    log-likelihood is returned; Dallal's model takes the smallest.
    Raises NoAdmissibleRootError when no root in (0, 1) gives valid
    joint probabilities.
    """
    impl = get_model(model)
    if group.is_degenerate:
        raise NoAdmissibleRootError("degenerate group has no normal equation")
    if model is ModelKind.INDEPENDENCE:
        return IndependenceModel.closed_form(group)

    poly = impl.pi_polynomial(kappa, group)
    if poly is None:
        candidates = bracketed_roots(lambda x: _group_score_pi(model, x, kappa, group), n_grid=_CLAYTON_GRID)
    else:
        candidates = unit_interval_roots(poly)

    admissible = [x for x in candidates if _admissible(model, x, kappa, group)]
    if not admissible:
        raise NoAdmissibleRootError(
            f"{model.value}: no admissible root for kappa={kappa!r}, group {group.label or '?'}"
        )
    if impl.root_rule == "smallest":
        return admissible[0]

    scored = [(group_log_likelihood(model, x, kappa, group), x) for x in admissible]
    best_ll = max(ll for ll, _ in scored)
    ties = [x for ll, x in scored if best_ll - ll <= _TIE_TOL * max(1.0, abs(best_ll))]
    if len(ties) > 1:
        logger.debug("Root tie for %s at kappa=%r: %s, taking the smallest", model.value, kappa, ties)
    return min(ties)


def _group_score_pi(model: ModelKind, x: np.ndarray, kappa: float | None, group: GroupCounts) -> np.ndarray:
    impl = get_model(model)
    x = np.asarray(x, dtype=float)
    p = impl.probs(x, kappa)
    dp = impl.dprobs_dpi(x, kappa)
    value = np.zeros_like(x)
    for r, count in enumerate(group.bilateral):
        if count:
            value = value + count * dp[r] / p[r]
    if group.n1:
        value = value + group.n1 / x
    if group.n0:
        value = value - group.n0 / (1.0 - x)
    return value


def _admissible(model: ModelKind, x: float, kappa: float | None, group: GroupCounts) -> bool:
    p = get_model(model).probs(np.asarray(x, dtype=float), kappa)
    if np.any(p < -PROB_TOL) or np.any(p > 1.0 + PROB_TOL):
        return False
    return math.isfinite(group_log_likelihood(model, x, kappa, group))


def _grid_objective(model: ModelKind, kappa: float | None, group: GroupCounts, grid: np.ndarray) -> np.ndarray:
    """Negative group log-likelihood over a pi grid; 1e300 where invalid."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        p = get_model(model).probs(grid, kappa)
        valid = np.all((p >= -PROB_TOL) & (p <= 1.0 + PROB_TOL), axis=0)
        counts = np.array(group.bilateral, dtype=float)[:, None]
        ll = xlogy(counts, np.clip(p, 0.0, 1.0)).sum(axis=0)
        ll = ll + xlogy(group.n0, 1.0 - grid) + xlogy(group.n1, grid)
    return np.where(valid & np.isfinite(ll), -ll, 1e300)


def _maximize_group_pi(model: ModelKind, kappa: float | None, group: GroupCounts) -> float:
    """Direct maximisation of one group's log-likelihood over valid pi.

    Used when the normal equation has no admissible root, which happens
    when the maximum sits on the edge of the valid region.
    """

    def objective(x: float) -> float:
        if not _admissible(model, x, kappa, group):
            return 1e300
        return -group_log_likelihood(model, x, kappa, group)

    grid = np.linspace(EPS, 1.0 - EPS, 201)
    values = _grid_objective(model, kappa, group, grid)
    k = int(np.argmin(values))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    best = float(res.x) if res.fun <= values[k] else float(grid[k])
    logger.debug("%s: pi for group %s maximised directly at %.3g", model.value, group.label, best)
    return best


def _update_pis(model: ModelKind, kappa: float | None, table: FrequencyTable) -> list[float]:
    pis = []
    for grp in table:
        try:
            pis.append(solve_pi_given_kappa(model, kappa, grp))
        except NoAdmissibleRootError:
            pis.append(_maximize_group_pi(model, kappa, grp))
    return pis


# ── Step 2: nuisance parameter ────────────────────────────────────


def _domain_for(model: ModelKind, pis: Sequence[float]) -> NuisanceInterval:
    clipped = [min(max(p, _PI_FLOOR), 1.0 - _PI_FLOOR) for p in pis]
    return get_model(model).domain(clipped)


def _kappa_update(
    model: ModelKind,
    pis: np.ndarray,
    kappa: float,
    m: np.ndarray,
    n: np.ndarray,
) -> KappaUpdate:
    domain = _domain_for(model, pis)
    base = loglik_from_counts(model, pis, kappa, m, n)
    score, curvature = kappa_derivatives(model, pis, kappa, m)
    if curvature == 0.0:
        raise SingularHessianError(f"{model.value}: zero curvature at kappa={kappa!r}")
    if curvature > 0.0:
        # Newton would head for a minimum
        return KappaUpdate(_line_search_kappa(model, pis, kappa, score, domain, m, n), False, 0)

    slack = 1e-12 * max(1.0, abs(base))

    def improves(value: float) -> float | None:
        if not domain.contains(value):
            return None
        ll = loglik_from_counts(model, pis, value, m, n)
        return ll if ll >= base - slack else None

    raw = kappa - score / curvature
    step = raw - kappa
    for halvings in range(MAX_HALVINGS + 1):
        candidate = kappa + step
        ll = improves(candidate)
        if ll is not None:
            break
        step *= 0.5
    else:
        clamped = domain.clamp_interior(raw, BOUNDARY_MARGIN)
        logger.info("%s: Newton step clamped to %.10g", model.value, clamped)
        return KappaUpdate(clamped, True, MAX_HALVINGS)

    if not domain.contains(raw):
        # The step left the domain: settle on the edge if the likelihood
        # keeps rising towards it.
        edge = domain.clamp_interior(raw, BOUNDARY_MARGIN)
        edge_ll = improves(edge)
        if edge_ll is not None and edge_ll >= ll:
            edge_score, _ = kappa_derivatives(model, pis, edge, m)
            if (edge_score > 0) == (edge > kappa):
                logger.info("%s: kappa on the domain edge %.10g", model.value, edge)
                return KappaUpdate(edge, True, halvings)
    return KappaUpdate(candidate, False, halvings)


def _line_search_kappa(
    model: ModelKind,
    pis: np.ndarray,
    kappa: float,
    score: float,
    domain: NuisanceInterval,
    m: np.ndarray,
    n: np.ndarray,
) -> float:
    """Bounded one-dimensional maximisation on the side the score points to."""
    lo = domain.clamp_interior(domain.lo, BOUNDARY_MARGIN)
    hi = domain.clamp_interior(domain.hi, BOUNDARY_MARGIN)
    if score > 0:
        lo = kappa
    elif score < 0:
        hi = kappa
    if hi <= lo:
        return kappa

    def objective(value: float) -> float:
        ll = loglik_from_counts(model, pis, value, m, n)
        return -ll if math.isfinite(ll) else 1e300

    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    best = float(res.x)
    return best if objective(best) <= objective(kappa) else kappa


def _polish_profile(
    model: ModelKind,
    table: FrequencyTable,
    kappa: float,
    previous: float,
    m: np.ndarray,
    n: np.ndarray,
    tol: float,
    max_steps: int = _POLISH_STEPS,
) -> ProfilePolish:
    """Secant iterations on the profile score once the alternation has settled.

    With the marginals re-solved at each kappa, the partial score in kappa
    is the derivative of the profile log-likelihood, so its root is the MLE.
    The result is settled when the score vanishes or a step falls below
    *tol*; otherwise the last accepted point is returned unsettled.
    """

    def profile(value: float) -> tuple[np.ndarray, float, float]:
        pis = np.array(_update_pis(model, value, table))
        score, _ = kappa_derivatives(model, pis, value, m)
        return pis, score, loglik_from_counts(model, pis, value, m, n)

    try:
        pis1, s1, ll1 = profile(kappa)
        if previous == kappa:
            previous = kappa - 1e-6 * max(1.0, abs(kappa))
        _, s0, _ = profile(previous)
    except NumericalError:
        return ProfilePolish(kappa, False)

    k0, k1 = previous, kappa
    for _ in range(max_steps):
        if abs(s1) < 1e-10:
            return ProfilePolish(k1, True)
        if s1 == s0:
            break
        k2 = k1 - s1 * (k1 - k0) / (s1 - s0)
        domain = _domain_for(model, pis1)
        if not domain.contains(k2) or abs(k2 - k1) > 10.0 * abs(k1 - k0) + 1e-8:
            break
        try:
            pis2, s2, ll2 = profile(k2)
        except NumericalError:
            break
        if ll2 < ll1 - 1e-9 * max(1.0, abs(ll1)):
            break
        step = abs(k2 - k1)
        k0, s0 = k1, s1
        k1, s1, ll1, pis1 = k2, s2, ll2, pis2
        if step < tol:
            return ProfilePolish(k1, True)
    return ProfilePolish(k1, abs(s1) < 1e-10)


def _on_edge(model: ModelKind, pis: Sequence[float], kappa: float) -> bool:
    domain = _domain_for(model, pis)
    gap = min(kappa - domain.lo, domain.hi - kappa)
    return gap <= _EDGE_TOL * max(1.0, abs(kappa))


def newton_kappa_step(model: ModelKind, params: ParamVector, table: FrequencyTable) -> float:
    """One damped Newton update of the nuisance parameter at fixed marginals."""
    if not model.has_nuisance:
        raise DomainError(f"{model.value}: no nuisance parameter")
    m, n = count_arrays(table)
    return _kappa_update(model, params.pi_array(), float(params.kappa), m, n).kappa


# ── Full fits ─────────────────────────────────────────────────────


def fit(model: ModelKind, table: FrequencyTable, opts: FitOptions | None = None) -> FitResult:
    """Maximum-likelihood fit of *model* to *table*."""
    opts = opts or FitOptions()
    if model is ModelKind.INDEPENDENCE:
        return fit_independence(table)
    if model is ModelKind.SATURATED:
        return fit_saturated(table)
    if table.m_total == 0:
        raise UnidentifiableError(f"{model.value}: nuisance parameter unidentifiable without bilateral data")

    impl = get_model(model)
    m, n = count_arrays(table)
    start = opts.pi_init or tuple(IndependenceModel.closed_form(grp) for grp in table)
    if len(start) != table.g:
        raise ConfigurationError(f"pi_init has {len(start)} entries for {table.g} groups")
    clipped = [min(max(p, _PI_FLOOR), 1.0 - _PI_FLOOR) for p in start]
    if opts.kappa_init is not None:
        kappa = float(opts.kappa_init)
        if not impl.domain(clipped).contains(kappa):
            raise DomainError(f"{model.value}: kappa_init {kappa!r} outside {impl.domain(clipped)}")
    else:
        kappa = impl.initial_kappa(clipped)

    converged = False
    boundary = False
    secant_tried = False
    secant_settled = False
    iterations = 0
    previous = kappa
    for iterations in range(1, opts.max_iter + 1):
        previous = kappa
        pis = np.array(_update_pis(model, kappa, table))
        try:
            update = _kappa_update(model, pis, kappa, m, n)
        except SingularHessianError:
            logger.debug("%s: zero curvature, falling back to a line search", model.value)
            score, _ = kappa_derivatives(model, pis, kappa, m)
            update = KappaUpdate(
                _line_search_kappa(model, pis, kappa, score, _domain_for(model, pis), m, n),
                False,
                0,
            )
        delta = abs(update.kappa - kappa)
        kappa, boundary = update.kappa, update.boundary
        if delta < opts.tol:
            converged = True
            break
        if delta < _SECANT_SWITCH and not boundary and not secant_tried:
            # the alternation converges linearly; finish on the profile score
            secant_tried = True
            polished = _polish_profile(model, table, kappa, previous, m, n, opts.tol)
            if polished.settled:
                kappa, converged, secant_settled = polished.kappa, True, True
                logger.debug("%s: profile secant settled after %d alternations", model.value, iterations)
                break

    if converged and not boundary and not secant_settled:
        kappa = _polish_profile(model, table, kappa, previous, m, n, opts.tol).kappa
    pis = _update_pis(model, kappa, table)
    boundary = boundary or _on_edge(model, pis, kappa)
    params = ParamVector(pis=tuple(pis), kappa=kappa)
    loglik = log_likelihood(model, params, table)
    if converged:
        logger.debug("%s converged in %d iterations: kappa=%.8g", model.value, iterations, kappa)
    else:
        logger.warning("%s did not converge after %d iterations", model.value, iterations)
    return FitResult(
        model=model,
        params=params,
        loglik=loglik,
        loglik_const=log_multinomial_constant(table),
        iterations=iterations,
        converged=converged,
        boundary=boundary,
    )


def fit_independence(table: FrequencyTable) -> FitResult:
    """Closed-form fit of the independence model."""
    pis = []
    for index, grp in enumerate(table):
        if grp.is_degenerate:
            raise DataValidationError("degenerate group", index)
        pis.append(IndependenceModel.closed_form(grp))
    params = ParamVector(pis=tuple(pis))
    return FitResult(
        model=ModelKind.INDEPENDENCE,
        params=params,
        loglik=log_likelihood(ModelKind.INDEPENDENCE, params, table),
        loglik_const=log_multinomial_constant(table),
        iterations=0,
        converged=True,
    )


def fit_saturated(table: FrequencyTable) -> FitResult:
    """Empirical proportions per group."""
    pis: list[float | None] = []
    joint: list[JointProbs | None] = []
    for grp in table:
        if grp.m_plus:
            joint.append(JointProbs(*(c / grp.m_plus for c in grp.bilateral)))
        else:
            joint.append(None)
        pis.append(grp.n1 / grp.n_plus if grp.n_plus else None)
    params = ParamVector(pis=tuple(pis), joint=tuple(joint))
    return FitResult(
        model=ModelKind.SATURATED,
        params=params,
        loglik=log_likelihood(ModelKind.SATURATED, params, table),
        loglik_const=log_multinomial_constant(table),
        iterations=0,
        converged=True,
    )
