"""Independence model: the two organs of a subject respond independently."""
from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial import Polynomial

from paired_gof.models.base import CorrelationModel, ModelKind, x_poly

if TYPE_CHECKING:
    from paired_gof.core.data import GroupCounts


class IndependenceModel(CorrelationModel):
    kind = ModelKind.INDEPENDENCE

    def probs(self, pi: np.ndarray, kappa: float | None = None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        q = 1.0 - pi
        return np.stack((q * q, 2.0 * pi * q, pi * pi))

    def dprobs_dpi(self, pi: np.ndarray, kappa: float | None = None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        return np.stack((-2.0 * (1.0 - pi), 2.0 * (1.0 - 2.0 * pi), 2.0 * pi))

    def correlation(self, pi: np.ndarray, kappa: float | None = None) -> np.ndarray:
        return np.zeros_like(np.asarray(pi, dtype=float))

    def pi_polynomial(self, kappa: float | None, group: GroupCounts) -> Polynomial:
        x = x_poly()
        m0, m1, m2, n0, n1 = group.counts()
        return -2 * m0 * x + m1 * (1 - 2 * x) + 2 * m2 * (1 - x) - n0 * x + n1 * (1 - x)

    @staticmethod
    def closed_form(group: GroupCounts) -> float:
        """(m1 + 2 m2 + n1) / (2 m+ + n+)."""
        return (group.m1 + 2 * group.m2 + group.n1) / (2 * group.m_plus + group.n_plus)
