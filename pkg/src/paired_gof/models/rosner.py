"""Rosner's constant-R model.

The conditional probability that one organ responds given that the other
did is R times the marginal probability: p2 = R pi^2.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from paired_gof.models.base import CorrelationModel, ModelKind, NuisanceInterval, x_poly

if TYPE_CHECKING:
    from paired_gof.core.data import GroupCounts


class RosnerModel(CorrelationModel):
    kind = ModelKind.ROSNER

    def probs(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        r_pi2 = kappa * pi * pi
        return np.stack((1.0 - 2.0 * pi + r_pi2, 2.0 * (pi - r_pi2), r_pi2))

    def dprobs_dpi(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        return np.stack((-2.0 + 2.0 * kappa * pi, 2.0 - 4.0 * kappa * pi, 2.0 * kappa * pi))

    def dprobs_dkappa(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        pi2 = np.asarray(pi, dtype=float) ** 2
        return np.stack((pi2, -2.0 * pi2, pi2))

    def d2probs_dkappa2(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        return np.zeros((3,) + np.shape(pi))

    def correlation(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        return (kappa - 1.0) * pi / (1.0 - pi)

    def domain(self, pis: Sequence[float]) -> NuisanceInterval:
        a = max(pis)
        if a <= 0.5:
            return NuisanceInterval(0.0, 1.0 / a, lo_closed=False)
        return NuisanceInterval((2.0 - 1.0 / a) / a, 1.0 / a)

    def initial_kappa(self, pis: Sequence[float]) -> float:
        return self.domain(pis).clamp_interior(1.0)

    def pi_polynomial(self, kappa: float | None, group: GroupCounts) -> Polynomial:
        # Score in pi multiplied through by pi (1 - pi) p0 (1 - R pi).
        x = x_poly()
        m0, m1, m2, n0, n1 = group.counts()
        r = kappa
        p0 = 1 - 2 * x + r * x**2
        s = 1 - r * x
        return (
            2 * m0 * (r * x - 1) * x * (1 - x) * s
            + m1 * (1 - 2 * r * x) * (1 - x) * p0
            + 2 * m2 * (1 - x) * p0 * s
            - n0 * x * p0 * s
            + n1 * (1 - x) * p0 * s
        )
