from paired_gof.estimation.fit import (
    FitOptions,
    FitResult,
    fit,
    fit_independence,
    fit_saturated,
    newton_kappa_step,
    solve_pi_given_kappa,
)

__all__ = [
    "FitOptions",
    "FitResult",
    "fit",
    "fit_independence",
    "fit_saturated",
    "newton_kappa_step",
    "solve_pi_given_kappa",
]
