"""Tests for the correlation models and the likelihood layer."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paired_gof.core.data import FrequencyTable, GroupCounts
from paired_gof.errors import DomainError, SingularPointError
from paired_gof.estimation.roots import unit_interval_roots
from paired_gof.models import (
    JointProbs,
    ModelKind,
    NuisanceInterval,
    ParamVector,
    correlation,
    d2_kappa,
    get_model,
    joint_probs,
    log_likelihood,
    log_multinomial_constant,
    nuisance_domain,
    score_kappa,
    score_pi,
)
from paired_gof.models.clayton import THETA_MAX

NUISANCE_MODELS = [ModelKind.ROSNER, ModelKind.DONNER, ModelKind.DALLAL, ModelKind.CLAYTON]

# A representative nuisance value per model, inside the domain for pi <= 0.6.
KAPPA = {
    ModelKind.ROSNER: 1.3,
    ModelKind.DONNER: 0.4,
    ModelKind.DALLAL: 0.7,
    ModelKind.CLAYTON: 2.5,
}


def _independent(pi: float) -> tuple[float, float, float]:
    return ((1 - pi) ** 2, 2 * pi * (1 - pi), pi**2)


def _random_points(model: ModelKind, rng: np.random.Generator, count: int) -> list[ParamVector]:
    """Interior (pi1, pi2, kappa) points, keeping away from the domain edges."""
    points = []
    for _ in range(count):
        pis = tuple(float(p) for p in rng.uniform(0.05, 0.6, size=2))
        interval = nuisance_domain(model, pis)
        hi = min(interval.hi, 20.0)
        kappa = interval.lo + rng.uniform(0.05, 0.95) * (hi - interval.lo)
        points.append(ParamVector(pis=pis, kappa=float(kappa)))
    return points


class TestModelKind:
    @pytest.mark.parametrize(
        "name,kind",
        [
            ("Rosner", ModelKind.ROSNER),
            ("clayton-copula", ModelKind.CLAYTON),
            ("indep", ModelKind.INDEPENDENCE),
            (" DALLAL ", ModelKind.DALLAL),
        ],
    )
    def test_parse(self, name: str, kind: ModelKind) -> None:
        assert ModelKind.parse(name) is kind

    def test_parse_unknown(self) -> None:
        with pytest.raises(ValueError, match="unknown model"):
            ModelKind.parse("probit")

    def test_nuisance_flags(self) -> None:
        assert not ModelKind.INDEPENDENCE.has_nuisance
        assert not ModelKind.SATURATED.has_nuisance
        assert all(kind.has_nuisance for kind in NUISANCE_MODELS)
        assert ModelKind.DONNER.nuisance_symbol == "rho"


class TestNuisanceInterval:
    def test_open_lower_end(self) -> None:
        interval = NuisanceInterval(0.0, 2.0, lo_closed=False)
        assert not interval.contains(0.0)
        assert interval.contains(2.0)
        assert str(interval) == "(0, 2]"

    def test_clamp_interior(self) -> None:
        interval = NuisanceInterval(0.0, 1.0)
        assert interval.clamp_interior(5.0, 1e-3) == pytest.approx(0.999)
        assert interval.clamp_interior(-1.0, 1e-3) == pytest.approx(0.001)
        assert interval.clamp_interior(0.5) == 0.5

    def test_empty_interval_rejected(self) -> None:
        with pytest.raises(DomainError):
            NuisanceInterval(1.0, 1.0)


class TestJointProbs:
    def test_independence(self) -> None:
        jp = joint_probs(ModelKind.INDEPENDENCE, 0.3)
        assert jp.as_tuple() == pytest.approx(_independent(0.3))

    @pytest.mark.parametrize(
        "model,kappa",
        [(ModelKind.ROSNER, 1.0), (ModelKind.DONNER, 0.0), (ModelKind.DALLAL, 0.35)],
    )
    def test_nests_independence(self, model: ModelKind, kappa: float) -> None:
        assert joint_probs(model, 0.35, kappa).as_tuple() == pytest.approx(_independent(0.35))

    def test_clayton_small_theta_near_independence(self) -> None:
        jp = joint_probs(ModelKind.CLAYTON, 0.35, 1e-7)
        assert jp.as_tuple() == pytest.approx(_independent(0.35), abs=1e-6)

    def test_rosner_values(self) -> None:
        jp = joint_probs(ModelKind.ROSNER, 0.3, 1.5)
        assert jp.p2 == pytest.approx(1.5 * 0.09)
        assert jp.p1 == pytest.approx(2 * (0.3 - 0.135))
        assert jp.p0 == pytest.approx(1 - 0.6 + 0.135)

    def test_donner_values(self) -> None:
        jp = joint_probs(ModelKind.DONNER, 0.4, 0.5)
        assert jp.p0 == pytest.approx(0.36 + 0.5 * 0.24)
        assert jp.p1 == pytest.approx(2 * 0.24 * 0.5)
        assert jp.p2 == pytest.approx(0.16 + 0.5 * 0.24)

    def test_dallal_values(self) -> None:
        jp = joint_probs(ModelKind.DALLAL, 0.2, 0.6)
        assert jp.as_tuple() == pytest.approx((1 - 1.4 * 0.2, 2 * 0.2 * 0.4, 0.12))

    @pytest.mark.parametrize("theta", [0.5, 2.0, 8.0])
    def test_clayton_matches_copula(self, theta: float) -> None:
        pi = 0.3
        u = 1 - pi
        c = (2 * u ** (-theta) - 1) ** (-1 / theta)
        jp = joint_probs(ModelKind.CLAYTON, pi, theta)
        assert jp.p0 == pytest.approx(c, rel=1e-12)
        assert jp.p1 == pytest.approx(2 * (u - c), rel=1e-10)
        assert jp.p2 == pytest.approx(pi - (u - c), rel=1e-10)

    def test_worked_values(self) -> None:
        assert joint_probs(ModelKind.DONNER, 0.5, 0.0).as_tuple() == pytest.approx((0.25, 0.5, 0.25))
        assert joint_probs(ModelKind.DONNER, 0.5, 1.0).as_tuple() == pytest.approx((0.5, 0.0, 0.5), abs=1e-12)
        assert joint_probs(ModelKind.ROSNER, 0.4, 1.5).as_tuple() == pytest.approx((0.44, 0.32, 0.24))

    def test_clayton_midpoint_is_uniform(self) -> None:
        # C(0.5, 0.5) = (2 + 2 - 1) ** -1 at theta = 1
        jp = joint_probs(ModelKind.CLAYTON, 0.5, 1.0)
        assert jp.as_tuple() == pytest.approx((1 / 3, 1 / 3, 1 / 3), rel=1e-12)
        assert correlation(ModelKind.CLAYTON, 0.5, 1.0) == pytest.approx(1 / 3, rel=1e-12)

    def test_clayton_extreme_theta_is_finite(self) -> None:
        jp = joint_probs(ModelKind.CLAYTON, 0.3, THETA_MAX)
        assert jp.is_valid()
        assert jp.p1 < 0.01

    def test_out_of_domain(self) -> None:
        with pytest.raises(DomainError):
            joint_probs(ModelKind.ROSNER, 0.3, 4.0)
        with pytest.raises(DomainError):
            joint_probs(ModelKind.DONNER, 0.2, -0.5)
        with pytest.raises(DomainError):
            joint_probs(ModelKind.CLAYTON, 0.2, 0.0)

    def test_missing_nuisance(self) -> None:
        with pytest.raises(DomainError):
            joint_probs(ModelKind.DALLAL, 0.2)

    @settings(max_examples=200, deadline=None)
    @given(
        model=st.sampled_from(NUISANCE_MODELS),
        pi=st.floats(min_value=0.01, max_value=0.99),
        frac=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_valid_on_whole_domain(self, model: ModelKind, pi: float, frac: float) -> None:
        interval = nuisance_domain(model, [pi])
        kappa = interval.clamp_interior(interval.lo + frac * (interval.hi - interval.lo), 1e-9)
        jp = joint_probs(model, pi, kappa)
        assert isinstance(jp, JointProbs)
        assert jp.is_valid()
        # the marginal probability of one organ is pi
        assert jp.p1 / 2 + jp.p2 == pytest.approx(pi, abs=1e-9)


class TestDomains:
    def test_rosner_low_prevalence(self) -> None:
        interval = nuisance_domain(ModelKind.ROSNER, [0.2, 0.3])
        assert interval.lo == 0.0 and not interval.lo_closed
        assert interval.hi == pytest.approx(1 / 0.3)

    def test_rosner_high_prevalence(self) -> None:
        interval = nuisance_domain(ModelKind.ROSNER, [0.6])
        assert interval.lo == pytest.approx((2 - 1 / 0.6) / 0.6)
        assert interval.hi == pytest.approx(1 / 0.6)

    def test_donner(self) -> None:
        interval = nuisance_domain(ModelKind.DONNER, [0.2, 0.5])
        assert interval.lo == pytest.approx(-0.25)
        assert interval.hi == 1.0

    def test_dallal(self) -> None:
        assert nuisance_domain(ModelKind.DALLAL, [0.3]).lo == 0.0
        assert nuisance_domain(ModelKind.DALLAL, [0.6]).lo == pytest.approx(2 - 1 / 0.6)

    def test_clayton(self) -> None:
        interval = nuisance_domain(ModelKind.CLAYTON, [0.5])
        assert not interval.contains(0.0)
        assert interval.contains(THETA_MAX)
        assert not interval.contains(THETA_MAX + 1)

    def test_no_nuisance(self) -> None:
        with pytest.raises(DomainError):
            nuisance_domain(ModelKind.INDEPENDENCE, [0.5])


class TestCorrelation:
    def test_rosner(self) -> None:
        assert correlation(ModelKind.ROSNER, 0.3, 1.5) == pytest.approx(0.5 * 0.3 / 0.7)

    def test_donner_is_rho(self) -> None:
        assert correlation(ModelKind.DONNER, 0.3, 0.42) == pytest.approx(0.42)

    def test_dallal(self) -> None:
        assert correlation(ModelKind.DALLAL, 0.2, 0.6) == pytest.approx(0.5)

    def test_clayton_positive(self) -> None:
        assert 0.0 < correlation(ModelKind.CLAYTON, 0.3, 2.0) < 1.0

    def test_independence_zero(self) -> None:
        assert correlation(ModelKind.INDEPENDENCE, 0.4) == 0.0


class TestDerivatives:
    @pytest.mark.parametrize("model", NUISANCE_MODELS)
    @pytest.mark.parametrize("pi", [0.15, 0.45])
    def test_dprobs_dpi(self, model: ModelKind, pi: float) -> None:
        impl, kappa, h = get_model(model), KAPPA[model], 1e-6
        numeric = (impl.probs(np.asarray(pi + h), kappa) - impl.probs(np.asarray(pi - h), kappa)) / (2 * h)
        assert impl.dprobs_dpi(np.asarray(pi), kappa) == pytest.approx(numeric, rel=1e-5, abs=1e-8)

    @pytest.mark.parametrize("model", NUISANCE_MODELS)
    def test_dprobs_dkappa(self, model: ModelKind) -> None:
        impl, kappa, h, pi = get_model(model), KAPPA[model], 1e-6, np.asarray(0.35)
        numeric = (impl.probs(pi, kappa + h) - impl.probs(pi, kappa - h)) / (2 * h)
        assert impl.dprobs_dkappa(pi, kappa) == pytest.approx(numeric, rel=1e-5, abs=1e-9)

    @pytest.mark.parametrize("theta", [0.3, 2.5, 40.0])
    def test_clayton_second_derivative(self, theta: float) -> None:
        impl, h, pi = get_model(ModelKind.CLAYTON), 1e-4 * theta, np.asarray(0.35)
        numeric = (impl.dprobs_dkappa(pi, theta + h) - impl.dprobs_dkappa(pi, theta - h)) / (2 * h)
        assert impl.d2probs_dkappa2(pi, theta) == pytest.approx(numeric, rel=1e-4, abs=1e-10)

    @pytest.mark.parametrize("model", NUISANCE_MODELS)
    def test_scores_match_loglik(self, model: ModelKind, ome_table: FrequencyTable) -> None:
        params = ParamVector(pis=(0.4, 0.55), kappa=KAPPA[model])
        h = 1e-6

        def ll(p: ParamVector) -> float:
            return log_likelihood(model, p, ome_table)

        numeric_pi = (ll(params.with_pis([0.4 + h, 0.55])) - ll(params.with_pis([0.4 - h, 0.55]))) / (2 * h)
        assert score_pi(model, params, ome_table, 0) == pytest.approx(numeric_pi, rel=1e-5, abs=1e-6)

        kappa = KAPPA[model]
        numeric_k = (ll(params.with_kappa(kappa + h)) - ll(params.with_kappa(kappa - h))) / (2 * h)
        assert score_kappa(model, params, ome_table) == pytest.approx(numeric_k, rel=1e-5, abs=1e-6)

    @pytest.mark.parametrize("model", NUISANCE_MODELS)
    def test_random_points_match_finite_differences(self, model: ModelKind, ome_table: FrequencyTable) -> None:
        def ll(p: ParamVector) -> float:
            return log_likelihood(model, p, ome_table)

        rng = np.random.default_rng(31)
        for params in _random_points(model, rng, 100):
            h = 1e-6
            for i in range(2):
                up = list(params.pis)
                down = list(params.pis)
                up[i] += h
                down[i] -= h
                numeric = (ll(params.with_pis(up)) - ll(params.with_pis(down))) / (2 * h)
                assert score_pi(model, params, ome_table, i) == pytest.approx(numeric, rel=1e-4, abs=1e-5)

            kappa = params.kappa
            numeric_k = (ll(params.with_kappa(kappa + h)) - ll(params.with_kappa(kappa - h))) / (2 * h)
            assert score_kappa(model, params, ome_table) == pytest.approx(numeric_k, rel=1e-4, abs=1e-5)

            h2 = 1e-5
            numeric_d2 = (
                score_kappa(model, params.with_kappa(kappa + h2), ome_table)
                - score_kappa(model, params.with_kappa(kappa - h2), ome_table)
            ) / (2 * h2)
            assert d2_kappa(model, params, ome_table) == pytest.approx(numeric_d2, rel=1e-3, abs=1e-4)

    def test_dallal_score_positive_without_discordant_pairs(self) -> None:
        table = FrequencyTable.from_counts([(6, 0, 4, 3, 2), (5, 0, 3)])
        for gamma in np.linspace(0.01, 0.99, 50):
            params = ParamVector(pis=(0.3, 0.4), kappa=float(gamma))
            assert score_kappa(ModelKind.DALLAL, params, table) > 0.0

    def test_dallal_curvature_negative(self, ome_table: FrequencyTable) -> None:
        for gamma in np.linspace(0.05, 0.95, 19):
            params = ParamVector(pis=(0.4, 0.5), kappa=float(gamma))
            assert d2_kappa(ModelKind.DALLAL, params, ome_table) < 0.0

    def test_score_singular_point(self) -> None:
        # p2 = 0 at gamma = 0 while m2 > 0
        table = FrequencyTable.from_counts([(3, 2, 1)])
        with pytest.raises(SingularPointError):
            score_kappa(ModelKind.DALLAL, ParamVector(pis=(0.3,), kappa=0.0), table)

    def test_saturated_has_no_score(self, ome_table: FrequencyTable) -> None:
        with pytest.raises(DomainError):
            score_pi(ModelKind.SATURATED, ParamVector(pis=(0.4, 0.5)), ome_table, 0)


class TestNormalEquations:
    @pytest.mark.parametrize(
        "model", [ModelKind.INDEPENDENCE, ModelKind.ROSNER, ModelKind.DONNER, ModelKind.DALLAL]
    )
    def test_polynomial_roots_zero_the_score(self, model: ModelKind) -> None:
        group = GroupCounts(21, 9, 14, 38, 24)
        table = FrequencyTable(groups=(group,))
        kappa = KAPPA.get(model)
        poly = get_model(model).pi_polynomial(kappa, group)
        roots = unit_interval_roots(poly)
        admissible = [x for x in roots if JointProbs(*get_model(model).probs(np.asarray(x), kappa)).is_valid(1e-12)]
        assert admissible
        for x in admissible:
            assert score_pi(model, ParamVector(pis=(x,), kappa=kappa), table, 0) == pytest.approx(0.0, abs=1e-6)

    def test_independence_polynomial_root_is_closed_form(self) -> None:
        group = GroupCounts(21, 9, 14, 38, 24)
        roots = unit_interval_roots(get_model(ModelKind.INDEPENDENCE).pi_polynomial(None, group))
        assert roots == pytest.approx([61 / 150])

    def test_clayton_has_no_polynomial(self) -> None:
        assert get_model(ModelKind.CLAYTON).pi_polynomial(2.0, GroupCounts(1, 2, 3)) is None


class TestLikelihood:
    def test_independence_loglik(self) -> None:
        table = FrequencyTable.from_counts([(1, 1, 1, 1, 1)])
        pi = 0.5
        expected = math.log(0.25) + math.log(0.5) + math.log(0.25) + 2 * math.log(0.5)
        assert log_likelihood(ModelKind.INDEPENDENCE, ParamVector(pis=(pi,)), table) == pytest.approx(expected)

    def test_zero_cells_contribute_nothing(self) -> None:
        # p2 = 0 where m2 = 0 must not produce -inf
        table = FrequencyTable.from_counts([(3, 2, 0)])
        value = log_likelihood(ModelKind.DALLAL, ParamVector(pis=(0.3,), kappa=0.0), table)
        assert math.isfinite(value)

    def test_multinomial_constant(self) -> None:
        table = FrequencyTable.from_counts([(1, 1, 0, 1, 1)])
        assert log_multinomial_constant(table) == pytest.approx(2 * math.log(2))


def _random_table(rng: np.random.Generator) -> FrequencyTable:
    g = int(rng.integers(1, 5))
    groups = []
    for _ in range(g):
        counts = [int(c) for c in rng.integers(0, 21, size=5)]
        if sum(counts[:3]) == 0:
            counts[0] = 1
        groups.append(tuple(counts))
    return FrequencyTable.from_counts(groups)


class TestNesting:
    def test_independence_special_cases(self) -> None:
        rng = np.random.default_rng(47)
        for _ in range(50):
            table = _random_table(rng)
            pis = tuple(float(p) for p in rng.uniform(0.05, 0.95, size=table.g))
            base = log_likelihood(ModelKind.INDEPENDENCE, ParamVector(pis=pis), table)
            assert log_likelihood(ModelKind.ROSNER, ParamVector(pis=pis, kappa=1.0), table) == pytest.approx(
                base, rel=1e-12
            )
            assert log_likelihood(ModelKind.DONNER, ParamVector(pis=pis, kappa=0.0), table) == pytest.approx(
                base, rel=1e-12
            )
            clayton = log_likelihood(ModelKind.CLAYTON, ParamVector(pis=pis, kappa=1e-8), table)
            assert clayton == pytest.approx(base, abs=1e-5)
