from paired_gof.bootstrap.engine import (
    BootstrapOptions,
    bootstrap_from_fit,
    bootstrap_gof,
    bootstrap_rejects,
    sample_from_probs,
    sample_table,
)
from paired_gof.bootstrap.rng import RandomSource

__all__ = [
    "BootstrapOptions",
    "RandomSource",
    "bootstrap_from_fit",
    "bootstrap_gof",
    "bootstrap_rejects",
    "sample_from_probs",
    "sample_table",
]
