"""Donner's constant-rho model: one intra-subject correlation for all groups."""
from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from paired_gof.models.base import CorrelationModel, ModelKind, NuisanceInterval, x_poly

if TYPE_CHECKING:
    from paired_gof.core.data import GroupCounts


class DonnerModel(CorrelationModel):
    kind = ModelKind.DONNER

    def probs(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        q = 1.0 - pi
        shared = kappa * pi * q
        return np.stack((q * q + shared, 2.0 * pi * q * (1.0 - kappa), pi * pi + shared))

    def dprobs_dpi(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        slope = kappa * (1.0 - 2.0 * pi)
        return np.stack(
            (
                -2.0 * (1.0 - pi) + slope,
                2.0 * (1.0 - 2.0 * pi) * (1.0 - kappa),
                2.0 * pi + slope,
            )
        )

    def dprobs_dkappa(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        v = pi * (1.0 - pi)
        return np.stack((v, -2.0 * v, v))

    def d2probs_dkappa2(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        return np.zeros((3,) + np.shape(pi))

    def correlation(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        return np.full_like(np.asarray(pi, dtype=float), kappa)

    def domain(self, pis: Sequence[float]) -> NuisanceInterval:
        # p0 >= 0 needs rho >= -(1-pi)/pi and p2 >= 0 needs rho >= -pi/(1-pi).
        lo = -1.0
        for pi in pis:
            lo = max(lo, -(1.0 - pi) / pi, -pi / (1.0 - pi))
        return NuisanceInterval(lo, 1.0)

    def initial_kappa(self, pis: Sequence[float]) -> float:
        return self.domain(pis).clamp_interior(0.25)

    def pi_polynomial(self, kappa: float | None, group: GroupCounts) -> Polynomial:
        # Score in pi multiplied through by pi (1 - pi) A B, where
        # p0 = (1 - pi) A and p2 = pi B.
        x = x_poly()
        m0, m1, m2, n0, n1 = group.counts()
        rho = kappa
        a = 1 - (1 - rho) * x
        b = rho + (1 - rho) * x
        return (
            m0 * (2 * (1 - rho) * x + rho - 2) * x * b
            + m1 * (1 - 2 * x) * a * b
            + m2 * (2 * (1 - rho) * x + rho) * (1 - x) * a
            - n0 * x * a * b
            + n1 * (1 - x) * a * b
        )
