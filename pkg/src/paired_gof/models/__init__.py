from paired_gof.models.base import (
    CorrelationModel,
    JointProbs,
    ModelKind,
    NuisanceInterval,
    ParamVector,
)
from paired_gof.models.likelihood import (
    bilateral_probs,
    correlation,
    count_arrays,
    d2_kappa,
    get_model,
    group_log_likelihood,
    joint_probs,
    kappa_derivatives,
    log_likelihood,
    log_multinomial_constant,
    loglik_from_counts,
    nuisance_domain,
    score_kappa,
    score_pi,
)

__all__ = [
    "CorrelationModel",
    "JointProbs",
    "ModelKind",
    "NuisanceInterval",
    "ParamVector",
    "bilateral_probs",
    "correlation",
    "count_arrays",
    "d2_kappa",
    "get_model",
    "group_log_likelihood",
    "joint_probs",
    "kappa_derivatives",
    "log_likelihood",
    "log_multinomial_constant",
    "loglik_from_counts",
    "nuisance_domain",
    "score_kappa",
    "score_pi",
]
