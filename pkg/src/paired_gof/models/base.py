"""Model kinds, parameter containers, and the correlation-model interface."""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from paired_gof.errors import DomainError

if TYPE_CHECKING:
    from paired_gof.core.data import GroupCounts

PROB_TOL = 1e-12


class ModelKind(str, Enum):
    """The six models for combined bilateral/unilateral data."""

    INDEPENDENCE = "independence"
    ROSNER = "rosner"
    DONNER = "donner"
    DALLAL = "dallal"
    CLAYTON = "clayton"
    SATURATED = "saturated"

    @property
    def has_nuisance(self) -> bool:
        return self not in (ModelKind.INDEPENDENCE, ModelKind.SATURATED)

    @property
    def nuisance_symbol(self) -> str | None:
        return _NUISANCE_SYMBOLS.get(self)

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]

    @classmethod
    def parse(cls, name: str) -> ModelKind:
        key = name.strip().lower().replace("-", "_").replace(" ", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown model: {name!r}") from None


_NUISANCE_SYMBOLS = {
    ModelKind.ROSNER: "R",
    ModelKind.DONNER: "rho",
    ModelKind.DALLAL: "gamma",
    ModelKind.CLAYTON: "theta",
}

_DISPLAY_NAMES = {
    ModelKind.INDEPENDENCE: "Independence",
    ModelKind.ROSNER: "Rosner's",
    ModelKind.DONNER: "Donner's",
    ModelKind.DALLAL: "Dallal's",
    ModelKind.CLAYTON: "Clayton copula",
    ModelKind.SATURATED: "Saturated",
}

_ALIASES = {
    "clayton_copula": "clayton",
    "copula": "clayton",
    "indep": "independence",
    "constant_r": "rosner",
    "rho": "donner",
}


@dataclass(frozen=True)
class JointProbs:
    """Probabilities of 0, 1 and 2 responding organs for one bilateral subject."""

    p0: float
    p1: float
    p2: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p0, self.p1, self.p2)

    def is_valid(self, tol: float = PROB_TOL) -> bool:
        values = self.as_tuple()
        return all(-tol <= p <= 1 + tol for p in values) and abs(sum(values) - 1.0) <= 1e-10


@dataclass(frozen=True)
class NuisanceInterval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise DomainError(f"empty nuisance interval [{self.lo}, {self.hi}]")

    def contains(self, value: float) -> bool:
        above = value >= self.lo if self.lo_closed else value > self.lo
        below = value <= self.hi if self.hi_closed else value < self.hi
        return above and below

    def clamp_interior(self, value: float, margin: float = 1e-9) -> float:
        """Nearest point at least *margin* inside both ends."""
        lo, hi = self.lo + margin, self.hi - margin
        if lo > hi:
            return 0.5 * (self.lo + self.hi)
        return min(max(value, lo), hi)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class ParamVector:
    """Marginal probabilities per group plus the optional nuisance value.

    Saturated fits additionally carry per-group joint probabilities; a group
    without bilateral subjects has ``None`` there and a group without
    unilateral subjects has ``None`` as its marginal probability.
    """

    pis: tuple[float | None, ...]
    kappa: float | None = None
    joint: tuple[JointProbs | None, ...] | None = None

    @property
    def g(self) -> int:
        return len(self.pis)

    def pi_array(self) -> np.ndarray:
        return np.array([math.nan if p is None else p for p in self.pis], dtype=float)

    def with_kappa(self, kappa: float) -> ParamVector:
        return ParamVector(pis=self.pis, kappa=kappa, joint=self.joint)

    def with_pis(self, pis: Sequence[float]) -> ParamVector:
        return ParamVector(pis=tuple(float(p) for p in pis), kappa=self.kappa, joint=self.joint)


class CorrelationModel(ABC):
    """A parametric model mapping (pi, kappa) to bilateral joint probabilities.

    All probability methods are vectorised over *pi* and return arrays of
    shape ``(3,) + pi.shape`` ordered (p0, p1, p2).
    """

    kind: ModelKind
    # "likelihood": the admissible root with the largest log-likelihood wins;
    # "smallest": the smallest admissible root wins.
    root_rule: str = "likelihood"

    @abstractmethod
    def probs(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        """Joint probabilities (p0, p1, p2)."""

    @abstractmethod
    def dprobs_dpi(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        """First derivatives of (p0, p1, p2) with respect to pi."""

    def dprobs_dkappa(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        raise DomainError(f"{self.kind.value} has no nuisance parameter")

    def d2probs_dkappa2(self, pi: np.ndarray, kappa: float) -> np.ndarray:
        raise DomainError(f"{self.kind.value} has no nuisance parameter")

    @abstractmethod
    def correlation(self, pi: np.ndarray, kappa: float | None) -> np.ndarray:
        """Implied intra-subject correlation."""

    def domain(self, pis: Sequence[float]) -> NuisanceInterval:
        raise DomainError(f"{self.kind.value}: no nuisance parameter")

    def initial_kappa(self, pis: Sequence[float]) -> float:
        raise DomainError(f"{self.kind.value}: no nuisance parameter")

    def pi_polynomial(self, kappa: float | None, group: GroupCounts) -> Polynomial | None:
        """Numerator polynomial of the per-group normal equation in pi.

        Returns None when the equation is not polynomial and must be solved
        numerically.
        """
        return None


def x_poly() -> Polynomial:
    return Polynomial([0.0, 1.0])
