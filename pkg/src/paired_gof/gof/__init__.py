from paired_gof.gof.statistics import (
    asymptotic_from_fit,
    asymptotic_gof,
    chi_square_sf,
    degrees_of_freedom,
    expected_counts,
    gof_statistic,
    log_observed_table_probability,
    observed_table_probability,
)
from paired_gof.gof.types import (
    ALL_METHODS,
    ASYMPTOTIC_METHODS,
    BOOTSTRAP_METHODS,
    GofMethod,
    GofResult,
)

__all__ = [
    "ALL_METHODS",
    "ASYMPTOTIC_METHODS",
    "BOOTSTRAP_METHODS",
    "GofMethod",
    "GofResult",
    "asymptotic_from_fit",
    "asymptotic_gof",
    "chi_square_sf",
    "degrees_of_freedom",
    "expected_counts",
    "gof_statistic",
    "log_observed_table_probability",
    "observed_table_probability",
]
