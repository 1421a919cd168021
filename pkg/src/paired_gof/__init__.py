"""Goodness-of-fit testing and model selection for combined unilateral and
bilateral correlated binary data."""
from __future__ import annotations

from paired_gof.bootstrap import (
    BootstrapOptions,
    RandomSource,
    bootstrap_gof,
    bootstrap_rejects,
    sample_table,
)
from paired_gof.core import FrequencyTable, GroupCounts, parse_frequency_table, serialize_frequency_table, validate
from paired_gof.estimation import (
    FitOptions,
    FitResult,
    fit,
    fit_independence,
    fit_saturated,
    newton_kappa_step,
    solve_pi_given_kappa,
)
from paired_gof.gof import (
    GofMethod,
    GofResult,
    asymptotic_gof,
    chi_square_sf,
    degrees_of_freedom,
    expected_counts,
    gof_statistic,
    observed_table_probability,
)
from paired_gof.models import (
    JointProbs,
    ModelKind,
    NuisanceInterval,
    ParamVector,
    correlation,
    d2_kappa,
    joint_probs,
    log_likelihood,
    nuisance_domain,
    score_kappa,
    score_pi,
)
from paired_gof.selection import SelectionReport, aic, select_model
from paired_gof.simulation import RateReport, ScenarioConfig, classify_rate, run_grid, run_scenario

__all__ = [
    "BootstrapOptions",
    "FitOptions",
    "FitResult",
    "FrequencyTable",
    "GofMethod",
    "GofResult",
    "GroupCounts",
    "JointProbs",
    "ModelKind",
    "NuisanceInterval",
    "ParamVector",
    "RandomSource",
    "RateReport",
    "ScenarioConfig",
    "SelectionReport",
    "aic",
    "asymptotic_gof",
    "bootstrap_gof",
    "bootstrap_rejects",
    "chi_square_sf",
    "classify_rate",
    "correlation",
    "d2_kappa",
    "degrees_of_freedom",
    "expected_counts",
    "fit",
    "fit_independence",
    "fit_saturated",
    "gof_statistic",
    "joint_probs",
    "log_likelihood",
    "newton_kappa_step",
    "nuisance_domain",
    "observed_table_probability",
    "parse_frequency_table",
    "run_grid",
    "run_scenario",
    "sample_table",
    "score_kappa",
    "score_pi",
    "select_model",
    "serialize_frequency_table",
    "solve_pi_given_kappa",
    "validate",
]
