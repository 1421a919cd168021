"""Clayton copula model.

The joint distribution of the two latent organ responses is the Clayton
copula C(u, v) = (u^-theta + v^-theta - 1)^(-1/theta) evaluated at the
non-response margins u = v = 1 - pi, so p0 = C(u, u).

Everything is evaluated in log space: with l = log u and w = u^theta,
log C = l - log(2 - w) / theta, which stays finite for large theta and
tends to the independence value 2 l as theta goes to 0.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from paired_gof.models.base import CorrelationModel, ModelKind, NuisanceInterval

THETA_MAX = 500.0


class _CopulaTerms:
    """Intermediate quantities shared by the value and derivative formulas."""

    __slots__ = ("u", "ell", "w", "big_l", "c")

    def __init__(self, pi: np.ndarray, theta: float) -> None:
        self.u = 1.0 - pi
        self.ell = np.log1p(-pi)
        self.w = np.exp(theta * self.ell)
        self.big_l = np.log1p(-np.expm1(theta * self.ell))
        self.c = np.exp(self.ell - self.big_l / theta)

    def dlog_c(self, theta: float) -> tuple[np.ndarray, np.ndarray]:
        """First and second derivatives of log C with respect to theta."""
        two_minus_w = 2.0 - self.w
        d_l = -self.ell * self.w / two_minus_w
        d2_l = -2.0 * self.ell**2 * self.w / two_minus_w**2
        h1 = self.big_l / theta**2 - d_l / theta
        h2 = -2.0 * self.big_l / theta**3 + 2.0 * d_l / theta**2 - d2_l / theta
        return h1, h2


class ClaytonModel(CorrelationModel):
    kind = ModelKind.CLAYTON

    def probs(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        t = _CopulaTerms(pi, kappa)
        # u - C written through expm1 to keep p1 accurate for small theta
        gap = -t.u * np.expm1(-t.big_l / kappa)
        return np.stack((t.c, 2.0 * gap, pi - gap))

    def dprobs_dpi(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        t = _CopulaTerms(pi, kappa)
        dc_du = 2.0 * (t.c / t.u) / (2.0 - t.w)
        return np.stack((-dc_du, 2.0 * (dc_du - 1.0), 2.0 - dc_du))

    def dprobs_dkappa(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        t = _CopulaTerms(np.asarray(pi, dtype=float), kappa)
        h1, _ = t.dlog_c(kappa)
        dc = t.c * h1
        return np.stack((dc, -2.0 * dc, dc))

    def d2probs_dkappa2(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        t = _CopulaTerms(np.asarray(pi, dtype=float), kappa)
        h1, h2 = t.dlog_c(kappa)
        d2c = t.c * (h2 + h1 * h1)
        return np.stack((d2c, -2.0 * d2c, d2c))

    def correlation(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        pi = np.asarray(pi, dtype=float)
        t = _CopulaTerms(pi, kappa)
        return (t.c - t.u * t.u) / (pi * t.u)

    def domain(self, pis: Sequence[float]) -> NuisanceInterval:
        return NuisanceInterval(0.0, THETA_MAX, lo_closed=False)

    def initial_kappa(self, pis: Sequence[float]) -> float:
        return self.domain(pis).clamp_interior(1.0)
