"""Dallal's model: a constant probability gamma that one organ responds
given that the other responded, whatever the marginal probability."""
from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from paired_gof.models.base import CorrelationModel, ModelKind, NuisanceInterval, x_poly

if TYPE_CHECKING:
    from paired_gof.core.data import GroupCounts


class DallalModel(CorrelationModel):
    kind = ModelKind.DALLAL
    root_rule = "smallest"

    def probs(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        return np.stack((1.0 - (2.0 - kappa) * pi, 2.0 * pi * (1.0 - kappa), kappa * pi))

    def dprobs_dpi(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        ones = np.ones_like(np.asarray(pi, dtype=float))
        return np.stack((-(2.0 - kappa) * ones, 2.0 * (1.0 - kappa) * ones, kappa * ones))

    def dprobs_dkappa(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        return np.stack((pi, -2.0 * pi, pi))

    def d2probs_dkappa2(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        return np.zeros((3,) + np.shape(pi))

    def correlation(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        return (kappa - pi) / (1.0 - pi)

    def domain(self, pis: Sequence[float]) -> NuisanceInterval:
        a = max(pis)
        if a <= 0.5:
            return NuisanceInterval(0.0, 1.0)
        return NuisanceInterval(2.0 - 1.0 / a, 1.0)

    def initial_kappa(self, pis: Sequence[float]) -> float:
        # gamma = pi is independence; start from the mean marginal.
        return self.domain(pis).clamp_interior(float(np.mean(pis)))

    def pi_polynomial(self, kappa: float | None, group: GroupCounts) -> Polynomial:
        x = x_poly()
        m0, m1, m2, n0, n1 = group.counts()
        p0 = 1 - (2 - kappa) * x
        return -(2 - kappa) * m0 * x * (1 - x) + (m1 + m2 + n1) * (1 - x) * p0 - n0 * x * p0
